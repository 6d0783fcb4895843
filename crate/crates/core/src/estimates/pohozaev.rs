//! The Pohozaev identity on balls and the energy functional.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::profile::RadialProfile;
use crate::radial_solver::weak_residual;
use crate::testfn::{Bump, TestFunction};

use super::{sphere_area, volume_integral};

/// Largest weak residual accepted before evaluating the identity.
pub const POHOZAEV_GATE: f64 = 1e-6;
/// Log-spaced bumps used for the residual gate.
const GATE_BUMPS: usize = 3;

/// The five terms of
/// `(n+α)/(q+1) ∫_{B_R} |x|^α u^{q+1} - (n-p)/p ∫_{B_R} |∇u|^p
///  = (1/(q+1)) ∫_{∂B_R} |x|^α u^{q+1} x·ν + ∫_{∂B_R} |∇u|^{p-2} (x·∇u) u_ν
///    - (1/p) ∫_{∂B_R} |∇u|^p x·ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub radius: f64,
    pub q: f64,
    /// `(n+α)/(q+1) ∫ |x|^α u^{q+1}`.
    pub bulk_nonlinear: f64,
    /// `(n-p)/p ∫ |∇u|^p`.
    pub bulk_gradient: f64,
    /// `|S^{n-1}| R^{n+α} u^{q+1}/(q+1)`.
    pub boundary_nonlinear: f64,
    /// `|S^{n-1}| R^n |u_r|^p`.
    pub boundary_flux: f64,
    /// `-|S^{n-1}| R^n |u_r|^p / p`.
    pub boundary_gradient: f64,
    /// `|lhs - rhs| / max |term|`.
    pub relative_defect: f64,
    /// `(n-p)/p - (n+α)/(q+1)`, zero at critical parameters.
    pub balance_coefficient: f64,
    /// `∫_{B_R} |∇u|^p / ∫_{B_R} |x|^α u^{q+1}`, tending to 1 at criticality.
    pub energy_ratio: f64,
    /// Weak residual that passed the gate.
    pub weak_residual: f64,
}

impl PohozaevReport {
    pub fn lhs(&self) -> f64 {
        self.bulk_nonlinear - self.bulk_gradient
    }

    pub fn rhs(&self) -> f64 {
        self.boundary_nonlinear + self.boundary_flux + self.boundary_gradient
    }
}

/// Evaluates the identity on `B_R` for a profile of `-Δ_p u = |x|^α u^q`.
/// The profile must first pass a weak-residual gate on `(r_min, R)`.
pub fn pohozaev_audit(profile: &RadialProfile, q: f64, radius: f64) -> Result<PohozaevReport> {
    let params = *profile.params();
    let (p, alpha, n) = (params.p, params.alpha, params.n);
    if !(radius > profile.r_min()) {
        return Err(Error::Range(format!(
            "radius {radius} is below the first node"
        )));
    }
    profile.require_range(profile.r_min(), radius)?;
    let nl = Nonlinearity::lane_emden(q)?;
    let lo = profile.r_min().max(radius * 1e-3);
    let edges = crate::profile::log_grid(lo, radius, GATE_BUMPS + 1);
    let bumps: Vec<Bump> = edges.windows(2).map(|w| Bump::log(w[0], w[1])).collect();
    let refs: Vec<&dyn TestFunction> = bumps.iter().map(|b| b as &dyn TestFunction).collect();
    let residual = weak_residual(profile, &nl, &refs)?;
    if !(residual <= POHOZAEV_GATE) {
        return Err(Error::Gate {
            residual,
            gate: POHOZAEV_GATE,
        });
    }

    let cuts: Vec<f64> = Vec::new();
    let potential = volume_integral(profile, profile.r_min(), radius, &cuts, |s| {
        s.r.powf(alpha) * s.u.max(0.0).powf(q + 1.0)
    })?;
    let gradient = volume_integral(profile, profile.r_min(), radius, &cuts, |s| {
        s.ur.abs().powf(p)
    })?;
    let edge = profile.sample(radius)?;
    let area = sphere_area(n);
    let grad_edge = area * radius.powf(n) * edge.ur.abs().powf(p);
    let terms = [
        (n + alpha) / (q + 1.0) * potential,
        (n - p) / p * gradient,
        area * radius.powf(n + alpha) * edge.u.powf(q + 1.0) / (q + 1.0),
        grad_edge,
        -grad_edge / p,
    ];
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let defect = (terms[0] - terms[1] - (terms[2] + terms[3] + terms[4])).abs();
    Ok(PohozaevReport {
        radius,
        q,
        bulk_nonlinear: terms[0],
        bulk_gradient: terms[1],
        boundary_nonlinear: terms[2],
        boundary_flux: terms[3],
        boundary_gradient: terms[4],
        relative_defect: defect / scale,
        balance_coefficient: (n - p) / p - (n + alpha) / (q + 1.0),
        energy_ratio: gradient / potential,
        weak_residual: residual,
    })
}

/// `I(u; B_R) = ∫_{B_R} |∇u|^p/p - |x|^α 𝓕(u)` with `𝓕` the primitive of
/// the nonlinearity (see [`Nonlinearity::primitive`]).
pub fn energy(profile: &RadialProfile, nl: &Nonlinearity, radius: f64) -> Result<f64> {
    let params = *profile.params();
    let (p, alpha) = (params.p, params.alpha);
    if radius <= profile.r_min() {
        return Ok(0.0);
    }
    profile.require_range(profile.r_min(), radius)?;
    volume_integral(profile, profile.r_min(), radius, &[], |s| {
        s.ur.abs().powf(p) / p - s.r.powf(alpha) * nl.primitive(s.u)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::ProblemParams;
    use crate::profile::{log_grid, ProfileMeta, ProfileOrigin};
    use crate::radial_solver::explicit_critical_solution;
    use approx::assert_relative_eq;

    fn critical_profile(r_max: f64) -> RadialProfile {
        let params = ProblemParams::new(2.0, 0.0, 4.0).unwrap();
        explicit_critical_solution(&params, 3.0, 1.0, &log_grid(1e-3, r_max, 1200)).unwrap()
    }

    #[test]
    fn identity_on_explicit_solution() {
        let rep = pohozaev_audit(&critical_profile(40.0), 3.0, 20.0).unwrap();
        assert!(rep.relative_defect < 1e-5, "{rep:?}");
        assert_eq!(rep.balance_coefficient, 0.0);
        // closed-form values of the five terms (computed symbolically)
        assert_relative_eq!(rep.boundary_nonlinear, 0.001954, max_relative = 1e-3);
        assert_relative_eq!(rep.boundary_flux, 1.56344, max_relative = 1e-5);
        assert_relative_eq!(rep.boundary_gradient, -0.78172, max_relative = 1e-5);
        assert_relative_eq!(rep.bulk_nonlinear, 105.2738, max_relative = 1e-6);
        assert_relative_eq!(rep.bulk_gradient, 104.4901, max_relative = 1e-6);
    }

    #[test]
    fn constant_is_not_a_solution() {
        let params = ProblemParams::new(2.0, 0.0, 4.0).unwrap();
        let r = log_grid(1e-3, 30.0, 100);
        let prof = RadialProfile::from_slopes(
            params,
            r,
            vec![1.0; 100],
            vec![0.0; 100],
            None,
            ProfileMeta::new(ProfileOrigin::Imported, None),
        )
        .unwrap();
        assert!(matches!(
            pohozaev_audit(&prof, 3.0, 20.0),
            Err(Error::Gate { .. })
        ));
    }

    #[test]
    fn energy_of_constant_equilibrium() {
        let params = ProblemParams::new(2.0, 0.0, 3.0).unwrap();
        let r = log_grid(1e-6, 5.0, 200);
        let prof = RadialProfile::from_slopes(
            params,
            r,
            vec![1.0; 200],
            vec![0.0; 200],
            None,
            ProfileMeta::new(ProfileOrigin::Imported, None),
        )
        .unwrap();
        let nl = Nonlinearity::custom("affine", |u| u - 1.0, |_| 1.0, (0.0, 2.0)).unwrap();
        let ball = 4.0 / 3.0 * std::f64::consts::PI * 8.0;
        assert_relative_eq!(
            energy(&prof, &nl, 2.0).unwrap(),
            ball / 2.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn energy_is_additive_and_converges() {
        let prof = critical_profile(2000.0);
        let nl = Nonlinearity::lane_emden(3.0).unwrap();
        let e1 = energy(&prof, &nl, 10.0).unwrap();
        let e2 = energy(&prof, &nl, 50.0).unwrap();
        let shell = volume_integral(&prof, 10.0, 50.0, &[], |s| {
            s.ur * s.ur / 2.0 - nl.primitive(s.u)
        })
        .unwrap();
        assert_relative_eq!(e2, e1 + shell, max_relative = 1e-10);
        let e3 = energy(&prof, &nl, 1000.0).unwrap();
        assert!((e3 - e2).abs() < 1e-2 * e3.abs());
    }
}
