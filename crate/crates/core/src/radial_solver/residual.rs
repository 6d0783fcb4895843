//! Strong and weak residuals of the radial equation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::fornberg_weights;
use crate::nonlinearity::Nonlinearity;
use crate::profile::RadialProfile;
use crate::testfn::{integrate_against, TestFunction};

use super::ClosedForm;

/// Stencil width for the flux derivative (sixth order).
const STENCIL: usize = 7;

/// Maximum pointwise residual and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub at_r: f64,
    pub points: usize,
}

fn relative(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    (lhs - rhs).abs() / scale
}

/// Relative residual `|w' + r^{n-1+α}F(u)| / max(|w'|, |r^{n-1+α}F(u)|)` of a
/// closed form at the given radii, with `w'` from the analytic second
/// derivative.
pub fn closed_form_residual(cf: &ClosedForm, nl: &Nonlinearity, radii: &[f64]) -> ResidualReport {
    let params = cf.params();
    let mut report = ResidualReport {
        max_residual: 0.0,
        at_r: f64::NAN,
        points: radii.len(),
    };
    for &r in radii {
        let (u, _, _) = cf.eval(r);
        let source = -r.powf(params.n - 1.0 + params.alpha) * nl.value(u);
        let res = relative(cf.flux_derivative(r), source);
        if res > report.max_residual || report.at_r.is_nan() {
            report.max_residual = res;
            report.at_r = r;
        }
    }
    report
}

/// Pointwise residual of a discrete profile on its own nodes. The flux is
/// differentiated with seven-point Fornberg weights in `ln r` (sixth order on
/// log-uniform grids, valid on any grid); the three nodes nearest each end
/// are skipped so every stencil is centred.
pub fn pointwise_residual(profile: &RadialProfile, nl: &Nonlinearity) -> Result<ResidualReport> {
    let n_nodes = profile.len();
    if n_nodes < STENCIL {
        return Err(Error::Format(format!(
            "pointwise residual needs at least {STENCIL} nodes, got {n_nodes}"
        )));
    }
    let params = profile.params();
    let r = profile.r();
    let x: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let half = STENCIL / 2;
    let mut report = ResidualReport {
        max_residual: 0.0,
        at_r: f64::NAN,
        points: n_nodes - 2 * half,
    };
    for i in half..n_nodes - half {
        let w = fornberg_weights(x[i], &x[i - half..=i + half], 1);
        let dlog: f64 = w
            .iter()
            .zip(&profile.flux()[i - half..=i + half])
            .map(|(a, b)| a * b)
            .sum();
        let dflux = dlog / r[i];
        let source = -r[i].powf(params.n - 1.0 + params.alpha) * nl.value(profile.u()[i]);
        let res = relative(dflux, source);
        if !res.is_finite() {
            return Err(Error::DomainExit {
                r: r[i],
                u: profile.u()[i],
            });
        }
        if res > report.max_residual || report.at_r.is_nan() {
            report.max_residual = res;
            report.at_r = r[i];
        }
    }
    Ok(report)
}

/// Weak-form residual: for each test function,
/// `|∫ w φ' - ∫ r^{n-1+α} F(u) φ| / (|∫ w φ'| + |∫ r^{n-1+α} F(u) φ| + 1e-300)`,
/// maximised over the family.
pub fn weak_residual(
    profile: &RadialProfile,
    nl: &Nonlinearity,
    testfns: &[&dyn TestFunction],
) -> Result<f64> {
    let params = *profile.params();
    let mut worst = 0.0f64;
    for phi in testfns {
        let lhs = integrate_against(profile, *phi, |s, _, dphi| s.flux * dphi)?;
        let rhs = integrate_against(profile, *phi, |s, v, _| {
            s.r.powf(params.n - 1.0 + params.alpha) * nl.value(s.u) * v
        })?;
        worst = worst.max((lhs - rhs).abs() / (lhs.abs() + rhs.abs() + 1e-300));
    }
    Ok(worst)
}
