//! Shooting from the centre for `(r^{n-1}|u_r|^{p-2}u_r)' = -r^{n-1+α} F(u)`.
//!
//! The integrator advances the pair `(u, w)` with `w` the radial flux, so the
//! degeneracy of `|u_r|^{p-2}` at the centre never enters the stepper. The
//! dimension `n` is an arbitrary real coefficient.

mod closed_form;
mod residual;
mod stepper;

pub use closed_form::{explicit_critical_solution, explicit_gelfand_singular, ClosedForm};
pub use residual::{closed_form_residual, pointwise_residual, weak_residual, ResidualReport};
pub use stepper::{attempt, Attempt, Rhs, Tolerances};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ProblemParams;
use crate::nonlinearity::{Nonlinearity, NonlinearityKind};
use crate::profile::{
    log_grid, slope_from_flux, ProfileMeta, ProfileOrigin, RadialProfile, StopReason,
};

/// Largest step relative to the current radius; keeps the stepper resolving
/// power-law behaviour uniformly in `ln r`.
const MAX_LOG_STEP: f64 = 0.05;
/// Smallest step relative to the current radius before a domain exit is
/// declared.
const MIN_LOG_STEP: f64 = 1e-13;

/// Where the solution is recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutputGrid {
    /// Every accepted step.
    Steps,
    /// `points` nodes equally spaced in `ln r` on `[r_start, r_max]`; steps
    /// are clipped to land on them.
    LogUniform { points: usize },
    /// Prescribed radii in `(r_start, r_max]`, preceded by `r_start`.
    Explicit { radii: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub r_start: f64,
    pub r_max: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Number of terms of the centre series (1 or 2).
    pub series_order: usize,
    pub output: OutputGrid,
}

impl SolverConfig {
    /// Defaults: `r_start = 1e-6 r_max`, `rel_tol = 1e-10`, `abs_tol = 1e-12`,
    /// two series terms and 200 output nodes per decade.
    pub fn new(r_max: f64) -> Self {
        let r_start = 1e-6 * r_max;
        Self {
            r_start,
            r_max,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 2_000_000,
            series_order: 2,
            output: OutputGrid::LogUniform {
                points: points_per_decade(r_start, r_max, 200.0),
            },
        }
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_output(mut self, output: OutputGrid) -> Self {
        self.output = output;
        self
    }

    /// Moves the start radius, keeping the output density per decade.
    pub fn with_r_start(mut self, r_start: f64) -> Self {
        self.r_start = r_start;
        if let OutputGrid::LogUniform { .. } = self.output {
            self.output = OutputGrid::LogUniform {
                points: points_per_decade(r_start, self.r_max, 200.0),
            };
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_start > 0.0 && self.r_start < self.r_max && self.r_max.is_finite()) {
            return Err(Error::Config(format!(
                "need 0 < r_start < r_max (r_start = {}, r_max = {})",
                self.r_start, self.r_max
            )));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !(1..=2).contains(&self.series_order) {
            return Err(Error::Config(format!(
                "series_order must be 1 or 2, got {}",
                self.series_order
            )));
        }
        match &self.output {
            OutputGrid::LogUniform { points } if *points < 2 => Err(Error::Config(
                "log-uniform output needs at least two points".into(),
            )),
            OutputGrid::Explicit { radii } => {
                let sorted = radii.windows(2).all(|w| w[1] > w[0]);
                let inside = radii.iter().all(|&x| x > self.r_start && x <= self.r_max);
                if sorted && inside && !radii.is_empty() {
                    Ok(())
                } else {
                    Err(Error::Config(
                        "explicit output radii must be increasing and inside (r_start, r_max]"
                            .into(),
                    ))
                }
            }
            _ => Ok(()),
        }
    }
}

fn points_per_decade(lo: f64, hi: f64, per_decade: f64) -> usize {
    ((hi / lo).log10() * per_decade).ceil() as usize + 1
}

/// Series state `(u, w)` at radius `r` about the centre value `a`.
///
/// With `β = (p+α)/(p-1)`, the leading terms are
/// `u = a + c₁ r^β`, `w = -F(a) r^{n+α}/(n+α)`; the second order adds the
/// `F'(a)` feedback of the first correction.
pub fn center_series(
    params: &ProblemParams,
    nl: &Nonlinearity,
    a: f64,
    r: f64,
    order: usize,
) -> Result<[f64; 2]> {
    let ProblemParams { p, alpha, n } = *params;
    let fa = nl.value(a);
    let dfa = nl.derivative(a);
    if !fa.is_finite() || !dfa.is_finite() {
        return Err(Error::SeriesFailure(format!(
            "F or F' is not finite at a = {a} (F = {fa}, F' = {dfa})"
        )));
    }
    let na = n + alpha;
    if na <= 0.0 {
        return Err(Error::Domain(format!(
            "centre series needs n + alpha > 0, got {na}"
        )));
    }
    let beta = (p + alpha) / (p - 1.0);
    let c1 = -fa.signum() * (p - 1.0) / (p + alpha) * (fa.abs() / na).powf(1.0 / (p - 1.0));
    let mut u = a + c1 * r.powf(beta);
    let mut w = -fa * r.powf(na) / na;
    if order >= 2 && fa != 0.0 {
        let d = dfa * c1 * na / (fa * (na + beta));
        u += c1 * d / (2.0 * (p - 1.0)) * r.powf(2.0 * beta);
        w -= dfa * c1 * r.powf(na + beta) / (na + beta);
    }
    Ok([u, w])
}

fn check_initial_value(params: &ProblemParams, nl: &Nonlinearity, a: f64) -> Result<()> {
    nl.check_params(params)?;
    let ok = match nl.kind() {
        NonlinearityKind::LaneEmden { .. } | NonlinearityKind::NegativeExponent { .. } => a > 0.0,
        _ => nl.in_domain(a),
    };
    if !ok || !a.is_finite() {
        return Err(Error::Domain(format!(
            "initial value a = {a} is outside the admissible range of {}",
            nl.tag()
        )));
    }
    Ok(())
}

/// Integrates from `config.r_start` to `config.r_max` starting from the
/// centre value `u(0) = a`.
///
/// When the solution leaves the domain of `F` the profile is returned
/// truncated at the last accepted radius with
/// [`StopReason::DomainExit`]; it is never extrapolated.
pub fn solve_ivp(
    params: &ProblemParams,
    nl: &Nonlinearity,
    a: f64,
    config: &SolverConfig,
) -> Result<RadialProfile> {
    config.validate()?;
    check_initial_value(params, nl, a)?;
    let ProblemParams { alpha, n, .. } = *params;

    let nodes: Option<Vec<f64>> = match &config.output {
        OutputGrid::Steps => None,
        OutputGrid::LogUniform { points } => {
            Some(log_grid(config.r_start, config.r_max, *points)[1..].to_vec())
        }
        OutputGrid::Explicit { radii } => Some(radii.clone()),
    };

    let origin = |accepted, rejected| ProfileOrigin::Shot {
        initial_value: a,
        config: config.clone(),
        accepted_steps: accepted,
        rejected_steps: rejected,
    };

    if nl.value(a) == 0.0 {
        let mut r = vec![config.r_start];
        match &nodes {
            Some(v) => r.extend_from_slice(v),
            None => r.push(config.r_max),
        }
        let len = r.len();
        let profile = RadialProfile::from_parts(
            *params,
            r,
            vec![a; len],
            vec![0.0; len],
            vec![0.0; len],
            Some(vec![0.0; len]),
            ProfileMeta::new(origin(0, 0), Some(nl.to_spec())),
        )?;
        return Ok(profile.with_stop_reason(StopReason::Equilibrium));
    }

    let rhs = |r: f64, y: &[f64; 2]| -> Option<[f64; 2]> {
        if !nl.in_domain(y[0]) {
            return None;
        }
        let f = nl.value(y[0]);
        Some([
            slope_from_flux(params, r, y[1]),
            -r.powf(n - 1.0 + alpha) * f,
        ])
    };

    let tol = Tolerances {
        rel: config.rel_tol,
        abs: config.abs_tol,
    };
    let mut x = config.r_start;
    let mut y = center_series(params, nl, a, x, config.series_order)?;
    let mut k = rhs(x, &y).ok_or_else(|| {
        Error::SeriesFailure(format!("series start leaves the domain of F at r = {x:e}"))
    })?;

    let mut rs = vec![x];
    let mut us = vec![y[0]];
    let mut ws = vec![y[1]];
    let mut h = (MAX_LOG_STEP * x).min(config.r_max - x);
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut stop = StopReason::ReachedEnd;
    let mut node_iter = nodes.as_deref().unwrap_or(&[]).iter().copied().peekable();

    'outer: while x < config.r_max {
        let target = match nodes {
            Some(_) => match node_iter.peek() {
                Some(&t) => t,
                None => break,
            },
            None => config.r_max,
        };
        loop {
            if accepted + rejected >= config.max_steps {
                return Err(Error::StepFailure {
                    r: x,
                    steps: accepted + rejected,
                    reason: format!("step budget {} exhausted", config.max_steps),
                });
            }
            let remaining = target - x;
            let h_try = h.min(MAX_LOG_STEP * x).min(remaining);
            let lands = h_try >= remaining;
            match attempt(&rhs, x, &y, &k, h_try, tol) {
                Attempt::Accepted { y: yn, dy, next_h } => {
                    x = if lands { target } else { x + h_try };
                    y = yn;
                    k = dy;
                    // a step clipped to land on a node says little about the
                    // admissible size, so keep the previous proposal
                    h = if lands && h_try < h {
                        h.max(next_h)
                    } else {
                        next_h
                    };
                    accepted += 1;
                    if nodes.is_none() || lands {
                        rs.push(x);
                        us.push(y[0]);
                        ws.push(y[1]);
                    }
                    if lands {
                        if nodes.is_some() {
                            node_iter.next();
                        }
                        break;
                    }
                }
                Attempt::Rejected { next_h } => {
                    rejected += 1;
                    h = next_h;
                }
                Attempt::OutOfDomain => {
                    rejected += 1;
                    h = 0.25 * h_try;
                    if h < MIN_LOG_STEP * x {
                        stop = StopReason::DomainExit { r: x, u: y[0] };
                        break 'outer;
                    }
                }
            }
        }
    }

    if rs.len() < 2 {
        return Err(Error::DomainExit { r: x, u: y[0] });
    }
    let urs: Vec<f64> = rs
        .iter()
        .zip(&ws)
        .map(|(&r, &w)| slope_from_flux(params, r, w))
        .collect();
    let profile = RadialProfile::from_parts(
        *params,
        rs,
        us,
        urs,
        ws,
        None,
        ProfileMeta::new(origin(accepted, rejected), None),
    )?;
    Ok(profile.with_equation(nl).with_stop_reason(stop))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn series_leading_slope() {
        let params = ProblemParams::new(3.0, 1.0, 4.5).unwrap();
        let nl = Nonlinearity::gelfand();
        let r = 1e-3;
        let [_, w] = center_series(&params, &nl, 0.3, r, 1).unwrap();
        let ur = slope_from_flux(&params, r, w);
        let expected = -(0.3f64.exp() * r.powf(2.0) / 5.5).powf(0.5);
        assert_relative_eq!(ur, expected, max_relative = 1e-12);
    }
}
