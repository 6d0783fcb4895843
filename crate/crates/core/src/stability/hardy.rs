//! Stability of the critical family outside a ball via a weighted Hardy
//! inequality.
//!
//! With `θ = (n(p-2)+p)/(p-1)` the Hardy inequality
//! `((n-θ)/2)² ∫ φ²/|x|^θ ≤ ∫ |∇φ|²/|x|^{θ-2}` gives `Q(φ) ≥ 0` for every
//! `φ` supported outside `B_{R0}` as soon as
//! `r^α q u^{q-1} ≤ δ r^{-θ}` and `(p-1)|u_r|^{p-2} ≥ C r^{-(θ-2)}` for
//! `r > R0`, with `δ ≤ C ((n-θ)/2)²`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exponents::ProblemParams;
use crate::profile::log_grid;
use crate::radial_solver::ClosedForm;

/// Number of decades of `r > R0` that are sampled.
const SAMPLED_DECADES: f64 = 8.0;
const SAMPLES_PER_DECADE: usize = 250;

/// The measured quantities behind a Hardy stability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyCertificate {
    pub r0: f64,
    pub delta: f64,
    pub theta: f64,
    /// `sup_{r > R0} r^{α+θ} q u^{q-1}` over the samples.
    pub delta_effective: f64,
    /// `inf_{r > R0} (p-1)|u_r|^{p-2} r^{θ-2}` over the samples.
    pub gradient_constant: f64,
    /// `((n-θ)/2)²`; zero when `n ≤ θ`.
    pub hardy_constant: f64,
    pub samples: usize,
    pub passed: bool,
}

/// Checks the two pointwise comparisons for `u_ε` on `SAMPLED_DECADES`
/// decades of log-spaced radii beyond `R0`.
pub fn hardy_stability_check(
    params: &ProblemParams,
    q: f64,
    eps: f64,
    r0: f64,
    delta: f64,
) -> Result<HardyCertificate> {
    let cf = ClosedForm::critical(params, q, eps)?;
    let ProblemParams { p, alpha, n } = *params;
    let theta = (n * (p - 2.0) + p) / (p - 1.0);
    let hardy_constant = if n > theta {
        ((n - theta) / 2.0).powi(2)
    } else {
        0.0
    };
    let count = (SAMPLED_DECADES as usize) * SAMPLES_PER_DECADE + 1;
    let radii = log_grid(r0, r0 * 10f64.powf(SAMPLED_DECADES), count);
    let mut delta_eff = 0.0f64;
    let mut grad_c = f64::INFINITY;
    for &r in &radii {
        let (u, ur, _) = cf.eval(r);
        delta_eff = delta_eff.max(r.powf(alpha + theta) * q * u.powf(q - 1.0));
        grad_c = grad_c.min((p - 1.0) * ur.abs().powf(p - 2.0) * r.powf(theta - 2.0));
    }
    let passed = n > theta && delta_eff <= delta && delta <= grad_c * hardy_constant;
    Ok(HardyCertificate {
        r0,
        delta,
        theta,
        delta_effective: delta_eff,
        gradient_constant: grad_c,
        hardy_constant,
        samples: radii.len(),
        passed,
    })
}

/// The first radius in `candidates` (tried in order) for which the check
/// passes.
pub fn smallest_hardy_radius(
    params: &ProblemParams,
    q: f64,
    eps: f64,
    delta: f64,
    candidates: &[f64],
) -> Result<Option<HardyCertificate>> {
    for &r0 in candidates {
        let cert = hardy_stability_check(params, q, eps, r0, delta)?;
        if cert.passed {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}
