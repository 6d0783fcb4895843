//! Tail fits of `|u - u_∞|` against the decay exponent `N_p(α)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{decay_exponent, gelfand_upper_dimension, is_critical};
use crate::profile::{log_grid, RadialProfile};

use super::{linear_slope, log_log_slope};

/// Radii sampled inside the fit window.
const FIT_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Slope of `ln|u - u_∞|` against `ln r`, or of `|u|` against `ln r` on the
    /// logarithmic branch.
    pub fitted_slope: f64,
    /// `N_p(α)`; zero on the logarithmic branch.
    pub lower_bound: f64,
    pub u_infinity: f64,
    pub window: [f64; 2],
    /// Whether `n` is the borderline dimension `4(p+α)/(p-1) + p`, where the
    /// lower bound has logarithmic form.
    pub log_branch: bool,
}

impl DecayFit {
    /// `fitted_slope ≥ lower_bound - tol`.
    pub fn respects_bound(&self, tol: f64) -> bool {
        self.fitted_slope >= self.lower_bound - tol
    }
}

/// Limit of `u` at infinity from `u(R/4), u(R/2), u(R)` (`R = r_max`) by
/// Aitken's Δ² extrapolation, which is exact for `u_∞ + c r^{-β}`. Falls back
/// to `u(R)` when the differences do not shrink geometrically.
pub fn extrapolate_limit(profile: &RadialProfile) -> Result<f64> {
    let big_r = profile.r_max();
    let u0 = profile.sample(big_r / 4.0)?.u;
    let u1 = profile.sample(big_r / 2.0)?.u;
    let u2 = profile.sample(big_r)?.u;
    let (d0, d1) = (u1 - u0, u2 - u1);
    let denom = d1 - d0;
    let geometric = d0 != 0.0 && d1 / d0 > 0.0 && d1 / d0 < 1.0;
    if !geometric || denom == 0.0 {
        return Ok(u2);
    }
    Ok(u2 - d1 * d1 / denom)
}

/// Fits the tail of `profile` on `window = [r1, r2]`; `u_infinity` is
/// extrapolated when not supplied. The window must end at least one octave
/// before the last node.
pub fn decay_fit(
    profile: &RadialProfile,
    window: (f64, f64),
    u_infinity: Option<f64>,
) -> Result<DecayFit> {
    let (r1, r2) = window;
    if !(r1 > 0.0 && r2 > r1) {
        return Err(Error::Range(format!("invalid fit window [{r1}, {r2}]")));
    }
    if r2 > profile.r_max() / 2.0 || r1 < profile.r_min() {
        return Err(Error::Range(format!(
            "fit window [{r1:e}, {r2:e}] must lie in [{:e}, {:e}] (one octave before r_max)",
            profile.r_min(),
            profile.r_max() / 2.0
        )));
    }
    let params = *profile.params();
    let log_branch = is_critical(params.n, gelfand_upper_dimension(params.p, params.alpha)?);
    let radii = log_grid(r1, r2, FIT_POINTS);
    let values = radii
        .iter()
        .map(|&r| profile.sample(r).map(|s| s.u))
        .collect::<Result<Vec<_>>>()?;
    if log_branch {
        let logs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let abs: Vec<f64> = values.iter().map(|u| u.abs()).collect();
        return Ok(DecayFit {
            fitted_slope: linear_slope(&logs, &abs),
            lower_bound: 0.0,
            u_infinity: f64::NAN,
            window: [r1, r2],
            log_branch,
        });
    }
    let u_inf = match u_infinity {
        Some(v) => v,
        None => extrapolate_limit(profile)?,
    };
    let gaps: Vec<f64> = values.iter().map(|u| (u - u_inf).abs()).collect();
    for (&r, (&g, &u)) in radii.iter().zip(gaps.iter().zip(&values)) {
        if !(g > 64.0 * f64::EPSILON * u.abs().max(u_inf.abs())) || !(g > f64::MIN_POSITIVE) {
            return Err(Error::Fit(format!(
                "|u - u_inf| = {g:e} is at rounding level at r = {r:e}"
            )));
        }
    }
    Ok(DecayFit {
        fitted_slope: log_log_slope(&radii, &gaps)?,
        lower_bound: decay_exponent(&params)?,
        u_infinity: u_inf,
        window: [r1, r2],
        log_branch,
    })
}
