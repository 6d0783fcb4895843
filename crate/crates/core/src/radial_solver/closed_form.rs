//! Exact radial solutions used as oracles.

use crate::error::{Error, Result};
use crate::exponents::{is_critical, q_star, ProblemParams};
use crate::nonlinearity::{Nonlinearity, NonlinearitySpec};
use crate::profile::{flux_from_slope, ProfileMeta, ProfileOrigin, RadialProfile};

/// A closed-form radial solution with analytic first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// The critical-dimension family
    /// `u_ε = A (ε + r^b)^c`, `b = (p+α)/(p-1)`, `c = (p-n)/(p+α)`,
    /// `A = (ε(n+α)((n-p)/(p-1))^{p-1})^{(n-p)/(p(p+α))}`, solving the
    /// Lane-Emden equation with `q = q*`.
    Critical {
        params: ProblemParams,
        q: f64,
        eps: f64,
    },
    /// `u_s = -(p+α) ln r + ln((p+α)^{p-1}(n-p))`, singular at the origin,
    /// solving the Gelfand equation.
    GelfandSingular { params: ProblemParams },
}

impl ClosedForm {
    pub fn critical(params: &ProblemParams, q: f64, eps: f64) -> Result<Self> {
        params.require_n_above_p()?;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        let star = q_star(params, q)?;
        if !is_critical(params.n, star) {
            return Err(Error::Domain(format!(
                "explicit family requires n = q*(alpha) = {star} (n = {})",
                params.n
            )));
        }
        Ok(Self::Critical {
            params: *params,
            q,
            eps,
        })
    }

    pub fn gelfand_singular(params: &ProblemParams) -> Result<Self> {
        params.require_n_above_p()?;
        Ok(Self::GelfandSingular { params: *params })
    }

    pub fn params(&self) -> &ProblemParams {
        match self {
            Self::Critical { params, .. } | Self::GelfandSingular { params } => params,
        }
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        match *self {
            Self::Critical { q, .. } => {
                Nonlinearity::lane_emden(q).expect("critical exponent is positive")
            }
            Self::GelfandSingular { .. } => Nonlinearity::gelfand(),
        }
    }

    /// `(u, u_r, u_rr)` at `r > 0`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        match *self {
            Self::Critical { params, eps, .. } => {
                let ProblemParams { p, alpha, n } = params;
                let amp = (eps * (n + alpha) * ((n - p) / (p - 1.0)).powf(p - 1.0))
                    .powf((n - p) / (p * (p + alpha)));
                let b = (p + alpha) / (p - 1.0);
                let c = (p - n) / (p + alpha);
                let rb = r.powf(b);
                let base = eps + rb;
                let u = amp * base.powf(c);
                // u_r = A c b r^{b-1} base^{c-1}
                let ur = amp * c * b * r.powf(b - 1.0) * base.powf(c - 1.0);
                let urr = amp
                    * c
                    * b
                    * (r.powf(b - 2.0) * base.powf(c - 2.0))
                    * ((b - 1.0) * base + (c - 1.0) * b * rb);
                (u, ur, urr)
            }
            Self::GelfandSingular { params } => {
                let ProblemParams { p, alpha, n } = params;
                let k = p + alpha;
                let u = -k * r.ln() + (k.powf(p - 1.0) * (n - p)).ln();
                (u, -k / r, k / (r * r))
            }
        }
    }

    /// Analytic flux derivative `r^{n-1}|u_r|^{p-2}((p-1)u_rr + (n-1)u_r/r)`.
    pub fn flux_derivative(&self, r: f64) -> f64 {
        let ProblemParams { p, n, .. } = *self.params();
        let (_, ur, urr) = self.eval(r);
        r.powf(n - 1.0) * ur.abs().powf(p - 2.0) * ((p - 1.0) * urr + (n - 1.0) * ur / r)
    }

    /// Evaluates the closed form on `grid`, with the exact flux derivative.
    pub fn profile(&self, grid: &[f64]) -> Result<RadialProfile> {
        let params = *self.params();
        let mut u = Vec::with_capacity(grid.len());
        let mut ur = Vec::with_capacity(grid.len());
        let mut flux = Vec::with_capacity(grid.len());
        let mut dflux = Vec::with_capacity(grid.len());
        for &r in grid {
            let (v, g, _) = self.eval(r);
            u.push(v);
            ur.push(g);
            flux.push(flux_from_slope(&params, r, g));
            dflux.push(self.flux_derivative(r));
        }
        let (origin, spec) = match *self {
            Self::Critical { q, eps, .. } => (
                ProfileOrigin::ExplicitCritical { q, eps },
                NonlinearitySpec::LaneEmden { q, scale: 1.0 },
            ),
            Self::GelfandSingular { .. } => (
                ProfileOrigin::ExplicitGelfandSingular,
                NonlinearitySpec::Gelfand { scale: 1.0 },
            ),
        };
        RadialProfile::from_parts(
            params,
            grid.to_vec(),
            u,
            ur,
            flux,
            Some(dflux),
            ProfileMeta::new(origin, Some(spec)),
        )
    }
}

/// The explicit critical-dimension solution `u_ε` sampled on `grid`.
pub fn explicit_critical_solution(
    params: &ProblemParams,
    q: f64,
    eps: f64,
    grid: &[f64],
) -> Result<RadialProfile> {
    ClosedForm::critical(params, q, eps)?.profile(grid)
}

/// The singular Gelfand solution sampled on `grid`.
pub fn explicit_gelfand_singular(params: &ProblemParams, grid: &[f64]) -> Result<RadialProfile> {
    ClosedForm::gelfand_singular(params)?.profile(grid)
}
