//! Discrete radial profiles: nodes, values, derivatives and the radial flux.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ProblemParams;
use crate::fd;
use crate::nonlinearity::{Nonlinearity, NonlinearitySpec};
use crate::quadrature::GaussLegendre;
use crate::radial_solver::SolverConfig;

/// Relative tolerance for the stored-versus-recomputed flux check applied to
/// imported data (values written with 17 significant digits agree far better).
const IMPORT_FLUX_TOL: f64 = 1e-10;

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum StopReason {
    ReachedEnd,
    /// The state left the domain of `F` just beyond `r`.
    DomainExit {
        r: f64,
        u: f64,
    },
    /// `F(a) = 0`: the constant function is returned.
    Equilibrium,
    /// Not produced by an integrator.
    NotApplicable,
}

/// How a profile came to be.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "origin", rename_all = "snake_case")]
pub enum ProfileOrigin {
    Shot {
        initial_value: f64,
        config: SolverConfig,
        accepted_steps: usize,
        rejected_steps: usize,
    },
    ExplicitCritical {
        q: f64,
        eps: f64,
    },
    ExplicitGelfandSingular,
    /// Image of a profile of `source` under the change of variables.
    PushForward {
        source: ProblemParams,
    },
    /// Preimage of a transformed profile; `source` is the weighted problem.
    PullBack {
        source: ProblemParams,
    },
    Imported,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    #[serde(flatten)]
    pub origin: ProfileOrigin,
    pub nonlinearity: Option<NonlinearitySpec>,
    pub stop_reason: StopReason,
}

impl ProfileMeta {
    pub fn new(origin: ProfileOrigin, nonlinearity: Option<NonlinearitySpec>) -> Self {
        Self {
            origin,
            nonlinearity,
            stop_reason: StopReason::NotApplicable,
        }
    }
}

/// Interpolated state at an arbitrary radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub r: f64,
    pub u: f64,
    pub ur: f64,
    pub flux: f64,
}

/// A discrete radial function with its radial derivative and flux
/// `r^{n-1}|u_r|^{p-2}u_r`.
///
/// Between nodes, `u` is the cubic Hermite interpolant of `(u, u_r)` and the
/// flux is the cubic Hermite interpolant of `(flux, flux')`; `u_r` is then
/// recovered from the flux, so the sampled triple is always flux-consistent.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    params: ProblemParams,
    r: Vec<f64>,
    u: Vec<f64>,
    ur: Vec<f64>,
    flux: Vec<f64>,
    dflux: Vec<f64>,
    meta: ProfileMeta,
}

/// `r^{n-1}|u_r|^{p-2}u_r`.
pub fn flux_from_slope(params: &ProblemParams, r: f64, ur: f64) -> f64 {
    r.powf(params.n - 1.0) * ur.abs().powf(params.p - 2.0) * ur
}

/// Inverse of [`flux_from_slope`]: `sign(w)(|w| r^{1-n})^{1/(p-1)}`.
pub fn slope_from_flux(params: &ProblemParams, r: f64, w: f64) -> f64 {
    let mag = (w.abs() * r.powf(1.0 - params.n)).powf(1.0 / (params.p - 1.0));
    mag.copysign(w)
}

impl RadialProfile {
    /// Builds a profile from node data. When `dflux` is `None` the flux
    /// derivative is estimated by seven-point finite differences; use
    /// [`Self::with_equation`] to replace it by the exact right-hand side.
    pub fn from_parts(
        params: ProblemParams,
        r: Vec<f64>,
        u: Vec<f64>,
        ur: Vec<f64>,
        flux: Vec<f64>,
        dflux: Option<Vec<f64>>,
        meta: ProfileMeta,
    ) -> Result<Self> {
        let n = r.len();
        if n < 2 {
            return Err(Error::Format(format!(
                "profile needs at least two nodes, got {n}"
            )));
        }
        if u.len() != n || ur.len() != n || flux.len() != n {
            return Err(Error::Format("node arrays have different lengths".into()));
        }
        if r[0] <= 0.0 {
            return Err(Error::Format(format!(
                "radii must be positive, first node is {}",
                r[0]
            )));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Format("radii must be strictly increasing".into()));
        }
        let all_finite = [&r, &u, &ur, &flux]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()));
        if !all_finite {
            return Err(Error::Format("profile contains non-finite values".into()));
        }
        let dflux = match dflux {
            Some(d) if d.len() == n => d,
            Some(_) => return Err(Error::Format("flux derivative has wrong length".into())),
            None => fd::derivative(&r, &flux, 7),
        };
        Ok(Self {
            params,
            r,
            u,
            ur,
            flux,
            dflux,
            meta,
        })
    }

    /// Builds a profile from `(r, u, u_r)`, computing the flux.
    pub fn from_slopes(
        params: ProblemParams,
        r: Vec<f64>,
        u: Vec<f64>,
        ur: Vec<f64>,
        dflux: Option<Vec<f64>>,
        meta: ProfileMeta,
    ) -> Result<Self> {
        let flux = r
            .iter()
            .zip(&ur)
            .map(|(&ri, &gi)| flux_from_slope(&params, ri, gi))
            .collect();
        Self::from_parts(params, r, u, ur, flux, dflux, meta)
    }

    /// Checks imported node data: the stored flux must match the recomputed one.
    pub fn validate_flux(&self) -> Result<()> {
        let err = self.flux_consistency_error();
        if err > IMPORT_FLUX_TOL {
            return Err(Error::Format(format!(
                "stored flux disagrees with r^(n-1)|u_r|^(p-2)u_r (max relative error {err:e})"
            )));
        }
        Ok(())
    }

    /// Sets the flux derivative from the equation, `-r^{n-1+α} F(u)`, and
    /// records the nonlinearity.
    pub fn with_equation(mut self, nl: &Nonlinearity) -> Self {
        let ProblemParams { alpha, n, .. } = self.params;
        self.dflux = self
            .r
            .iter()
            .zip(&self.u)
            .map(|(&r, &u)| -r.powf(n - 1.0 + alpha) * nl.value(u))
            .collect();
        self.meta.nonlinearity = Some(nl.to_spec());
        self
    }

    /// Applies `f` to the values, keeping derivatives and flux. Intended for
    /// building perturbed profiles in negative controls.
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        let mut out = self.clone();
        out.u.iter_mut().for_each(|u| *u = f(*u));
        out
    }

    pub fn with_meta(mut self, meta: ProfileMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_stop_reason(mut self, reason: StopReason) -> Self {
        self.meta.stop_reason = reason;
        self
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }
    pub fn meta(&self) -> &ProfileMeta {
        &self.meta
    }
    pub fn r(&self) -> &[f64] {
        &self.r
    }
    pub fn u(&self) -> &[f64] {
        &self.u
    }
    pub fn ur(&self) -> &[f64] {
        &self.ur
    }
    pub fn flux(&self) -> &[f64] {
        &self.flux
    }
    pub fn dflux(&self) -> &[f64] {
        &self.dflux
    }
    pub fn len(&self) -> usize {
        self.r.len()
    }
    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
    pub fn r_min(&self) -> f64 {
        self.r[0]
    }
    pub fn r_max(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    /// Maximum relative mismatch between stored and recomputed flux.
    pub fn flux_consistency_error(&self) -> f64 {
        self.r
            .iter()
            .zip(&self.ur)
            .zip(&self.flux)
            .map(|((&r, &g), &w)| {
                let re = flux_from_slope(&self.params, r, g);
                let scale = re.abs().max(w.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (re - w).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }

    /// Number of sign changes of `u_r` after the first node (zeros skipped).
    pub fn slope_sign_changes(&self) -> usize {
        let signs: Vec<f64> = self.ur[1..]
            .iter()
            .filter(|g| **g != 0.0)
            .map(|g| g.signum())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.r_min() && r <= self.r_max()
    }

    /// Errors unless `[lo, hi]` lies inside the node range.
    pub fn require_range(&self, lo: f64, hi: f64) -> Result<()> {
        if !(lo >= self.r_min() && hi <= self.r_max() && lo <= hi) {
            return Err(Error::Range(format!(
                "[{lo:e}, {hi:e}] is not inside the profile range [{:e}, {:e}]",
                self.r_min(),
                self.r_max()
            )));
        }
        Ok(())
    }

    fn locate(&self, r: f64) -> usize {
        match self.r.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(self.r.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.r.len() - 2),
        }
    }

    /// Interpolated state at `r`.
    pub fn sample(&self, r: f64) -> Result<Sample> {
        let slack = 1e-12 * self.r_max();
        if !(r >= self.r_min() - slack && r <= self.r_max() + slack) {
            return Err(Error::Range(format!(
                "radius {r:e} outside profile range [{:e}, {:e}]",
                self.r_min(),
                self.r_max()
            )));
        }
        let r = r.clamp(self.r_min(), self.r_max());
        let i = self.locate(r);
        let (r0, r1) = (self.r[i], self.r[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let u = hermite(t, h, self.u[i], self.ur[i], self.u[i + 1], self.ur[i + 1]);
        let flux = hermite(
            t,
            h,
            self.flux[i],
            self.dflux[i],
            self.flux[i + 1],
            self.dflux[i + 1],
        );
        let ur = if t == 0.0 {
            self.ur[i]
        } else if t == 1.0 {
            self.ur[i + 1]
        } else {
            slope_from_flux(&self.params, r, flux)
        };
        Ok(Sample { r, u, ur, flux })
    }

    /// `∫_a^b f(r, state) dr`, with a four-point Gauss rule on every node
    /// interval that meets `[a, b]`.
    pub fn integrate<F: FnMut(&Sample) -> f64>(&self, a: f64, b: f64, mut f: F) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        self.require_range(a.min(b), a.max(b))?;
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let rule = GaussLegendre::new(4);
        let mut total = 0.0;
        let mut i = self.locate(lo);
        loop {
            let x0 = self.r[i].max(lo);
            let x1 = self.r[i + 1].min(hi);
            if x1 > x0 {
                for (x, w) in rule.mapped(x0, x1) {
                    total += w * f(&self.sample(x)?);
                }
            }
            i += 1;
            if i + 1 >= self.r.len() || self.r[i] >= hi {
                break;
            }
        }
        Ok(sign * total)
    }
}

/// Cubic Hermite interpolation on `[x0, x0+h]` at fraction `t`.
fn hermite(t: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// `count` points equally spaced in `ln r` on `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> ProblemParams {
        ProblemParams::new(2.0, 0.0, 3.0).unwrap()
    }

    fn power_profile() -> RadialProfile {
        // u = r^{-1}: flux = r^2 · (-r^{-2}) = -1, dflux = 0
        let r = log_grid(0.5, 20.0, 200);
        let u = r.iter().map(|x| 1.0 / x).collect();
        let ur = r.iter().map(|x| -1.0 / (x * x)).collect();
        RadialProfile::from_slopes(
            params(),
            r,
            u,
            ur,
            None,
            ProfileMeta::new(ProfileOrigin::Imported, None),
        )
        .unwrap()
    }

    #[test]
    fn flux_round_trip() {
        let pp = ProblemParams::new(3.5, 1.0, 4.3).unwrap();
        for &g in &[-2.0, -1e-3, 0.0, 0.7, 5.0] {
            let w = flux_from_slope(&pp, 1.7, g);
            assert_relative_eq!(slope_from_flux(&pp, 1.7, w), g, max_relative = 1e-14);
        }
    }

    #[test]
    fn sampling_reproduces_smooth_functions() {
        let prof = power_profile();
        assert!(prof.flux_consistency_error() < 1e-15);
        for &r in &[0.5, 0.77, 3.3, 19.99, 20.0] {
            let s = prof.sample(r).unwrap();
            assert_relative_eq!(s.u, 1.0 / r, max_relative = 1e-8);
            assert_relative_eq!(s.ur, -1.0 / (r * r), max_relative = 1e-10);
        }
        assert!(prof.sample(25.0).is_err());
    }

    #[test]
    fn integration_over_subranges() {
        let prof = power_profile();
        let got = prof.integrate(1.0, 10.0, |s| s.u).unwrap();
        assert_relative_eq!(got, 10f64.ln(), max_relative = 1e-7);
        let back = prof.integrate(10.0, 1.0, |s| s.u).unwrap();
        assert_relative_eq!(back, -got);
        assert!(prof.integrate(0.1, 10.0, |s| s.u).is_err());
    }

    #[test]
    fn rejects_malformed_nodes() {
        let meta = ProfileMeta::new(ProfileOrigin::Imported, None);
        let bad = RadialProfile::from_slopes(
            params(),
            vec![1.0, 1.0, 2.0],
            vec![0.0; 3],
            vec![0.0; 3],
            None,
            meta.clone(),
        );
        assert!(matches!(bad, Err(Error::Format(_))));
        let neg = RadialProfile::from_slopes(
            params(),
            vec![-1.0, 1.0],
            vec![0.0; 2],
            vec![0.0; 2],
            None,
            meta,
        );
        assert!(neg.is_err());
    }

    #[test]
    fn log_grid_endpoints_exact() {
        let g = log_grid(0.01, 200.0, 57);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[56], 200.0);
        assert_relative_eq!(g[1] / g[0], g[40] / g[39], max_relative = 1e-12);
    }
}
