//! The change of variables `s = r^{1+α/p}`, `ω(s) = u(r)`.
//!
//! It maps radial solutions of `-Δ_{p,n} u = r^α F(u)` to radial solutions of
//! `-Δ_{p,N} ω = (1+α/p)^{-p} F(ω)` with `N = p(n+α)/(p+α)`, and back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{fractional_dimension, ProblemParams};
use crate::nonlinearity::Nonlinearity;
use crate::profile::{ProfileMeta, ProfileOrigin, RadialProfile};
use crate::radial_solver::{pointwise_residual, solve_ivp, ResidualReport, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformedProblem {
    pub source: ProblemParams,
    /// `α = 0`, `n = N_{α,p}`.
    pub target: ProblemParams,
    /// `(1+α/p)^{-p}`, the factor multiplying `F` in the target problem.
    pub scale: f64,
}

impl TransformedProblem {
    pub fn new(source: &ProblemParams) -> Result<Self> {
        let big_n = fractional_dimension(source)?;
        Ok(Self {
            source: *source,
            target: ProblemParams {
                p: source.p,
                alpha: 0.0,
                n: big_n,
            },
            scale: power_k(source).powf(-source.p),
        })
    }

    /// The exponent `k = 1 + α/p` of the substitution `s = r^k`.
    pub fn exponent(&self) -> f64 {
        power_k(&self.source)
    }

    /// The target nonlinearity `(1+α/p)^{-p} F`.
    pub fn target_nonlinearity(&self, nl: &Nonlinearity) -> Nonlinearity {
        nl.scaled(self.scale)
    }
}

fn power_k(params: &ProblemParams) -> f64 {
    1.0 + params.alpha / params.p
}

fn same_params(a: &ProblemParams, b: &ProblemParams) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0);
    close(a.p, b.p) && close(a.alpha, b.alpha) && close(a.n, b.n)
}

/// Maps a profile of the `source` problem to the transformed variables.
///
/// Nodes go to `s_i = r_i^k`, values are kept, `ω_s = u_r (p/(p+α)) r^{-α/p}`
/// and the flux becomes `k^{-(p-1)}` times the source flux.
pub fn push_forward(profile: &RadialProfile, source: &ProblemParams) -> Result<RadialProfile> {
    if !same_params(profile.params(), source) {
        return Err(Error::Config(format!(
            "profile parameters {:?} differ from the source problem {:?}",
            profile.params(),
            source
        )));
    }
    let tp = TransformedProblem::new(source)?;
    let k = tp.exponent();
    let p = source.p;
    if profile.r_min() <= 0.0 {
        return Err(Error::Domain(
            "negative or zero radius in push_forward".into(),
        ));
    }
    let flux_factor = k.powf(-(p - 1.0));
    let mut s = Vec::with_capacity(profile.len());
    let mut ws = Vec::with_capacity(profile.len());
    let mut flux = Vec::with_capacity(profile.len());
    let mut dflux = Vec::with_capacity(profile.len());
    for i in 0..profile.len() {
        let r = profile.r()[i];
        s.push(r.powf(k));
        ws.push(profile.ur()[i] / (k * r.powf(k - 1.0)));
        flux.push(flux_factor * profile.flux()[i]);
        dflux.push(flux_factor * profile.dflux()[i] / (k * r.powf(k - 1.0)));
    }
    let mut meta = ProfileMeta::new(ProfileOrigin::PushForward { source: *source }, None);
    meta.nonlinearity = profile.meta().nonlinearity.clone().map(|spec| {
        Nonlinearity::from_spec(&spec)
            .map(|nl| nl.scaled(tp.scale).to_spec())
            .unwrap_or(spec)
    });
    meta.stop_reason = profile.meta().stop_reason;
    RadialProfile::from_parts(
        tp.target,
        s,
        profile.u().to_vec(),
        ws,
        flux,
        Some(dflux),
        meta,
    )
}

/// Inverse of [`push_forward`]: maps a profile in the transformed variables
/// of `source` back to the weighted problem.
pub fn pull_back(profile: &RadialProfile, source: &ProblemParams) -> Result<RadialProfile> {
    let tp = TransformedProblem::new(source)?;
    if !same_params(profile.params(), &tp.target) {
        return Err(Error::Config(format!(
            "profile parameters {:?} are not the transformed parameters {:?}",
            profile.params(),
            tp.target
        )));
    }
    if profile.r_min() <= 0.0 {
        return Err(Error::Domain("negative or zero radius in pull_back".into()));
    }
    let k = tp.exponent();
    let p = source.p;
    let flux_factor = k.powf(p - 1.0);
    let mut r = Vec::with_capacity(profile.len());
    let mut ur = Vec::with_capacity(profile.len());
    let mut flux = Vec::with_capacity(profile.len());
    let mut dflux = Vec::with_capacity(profile.len());
    for i in 0..profile.len() {
        let s = profile.r()[i];
        let ri = s.powf(1.0 / k);
        let jac = k * ri.powf(k - 1.0);
        r.push(ri);
        ur.push(profile.ur()[i] * jac);
        flux.push(flux_factor * profile.flux()[i]);
        dflux.push(flux_factor * profile.dflux()[i] * jac);
    }
    let mut meta = ProfileMeta::new(ProfileOrigin::PullBack { source: *source }, None);
    meta.nonlinearity = profile.meta().nonlinearity.clone().map(|spec| {
        Nonlinearity::from_spec(&spec)
            .map(|nl| nl.scaled(1.0 / tp.scale).to_spec())
            .unwrap_or(spec)
    });
    meta.stop_reason = profile.meta().stop_reason;
    RadialProfile::from_parts(
        *source,
        r,
        profile.u().to_vec(),
        ur,
        flux,
        Some(dflux),
        meta,
    )
}

/// Maximum pointwise residual of the transformed equation on the image of
/// `profile` (a solution of the `source` problem with nonlinearity `nl`).
pub fn equivalence_residual(
    source: &ProblemParams,
    nl: &Nonlinearity,
    profile: &RadialProfile,
) -> Result<ResidualReport> {
    let tp = TransformedProblem::new(source)?;
    let image = push_forward(profile, source)?;
    pointwise_residual(&image, &tp.target_nonlinearity(nl))
}

/// Shoots the transformed problem directly from `ω(0) = a`. The configuration
/// radii are interpreted in the `s` variable.
pub fn solve_transformed(
    source: &ProblemParams,
    nl: &Nonlinearity,
    a: f64,
    config: &SolverConfig,
) -> Result<RadialProfile> {
    let tp = TransformedProblem::new(source)?;
    solve_ivp(&tp.target, &tp.target_nonlinearity(nl), a, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::log_grid;
    use crate::radial_solver::explicit_gelfand_singular;
    use approx::assert_relative_eq;

    #[test]
    fn target_parameters() {
        let tp = TransformedProblem::new(&ProblemParams::new(2.0, 2.0, 5.0).unwrap()).unwrap();
        assert_eq!(tp.target.alpha, 0.0);
        assert_relative_eq!(tp.target.n, 3.5);
        assert_relative_eq!(tp.scale, 0.25);
        assert_relative_eq!(tp.exponent(), 2.0);
    }

    #[test]
    fn grid_maps_by_power() {
        let params = ProblemParams::new(2.0, 2.0, 5.0).unwrap();
        let prof = explicit_gelfand_singular(&params, &[1.0, 4.0]).unwrap();
        let img = push_forward(&prof, &params).unwrap();
        assert_eq!(img.r(), &[1.0, 16.0]);
        assert_eq!(img.u(), prof.u());
        assert!(img.flux_consistency_error() < 1e-13);
    }

    #[test]
    fn identity_when_unweighted() {
        let params = ProblemParams::new(2.0, 0.0, 11.0).unwrap();
        let prof = explicit_gelfand_singular(&params, &log_grid(0.1, 10.0, 50)).unwrap();
        let img = push_forward(&prof, &params).unwrap();
        assert_eq!(img.r(), prof.r());
        assert_eq!(img.ur(), prof.ur());
        assert_eq!(img.flux(), prof.flux());
    }

    #[test]
    fn round_trip() {
        let params = ProblemParams::new(3.0, 1.7, 6.2).unwrap();
        let prof = explicit_gelfand_singular(&params, &log_grid(0.05, 40.0, 80)).unwrap();
        let back = pull_back(&push_forward(&prof, &params).unwrap(), &params).unwrap();
        for i in 0..prof.len() {
            assert_relative_eq!(back.r()[i], prof.r()[i], max_relative = 1e-12);
            assert_relative_eq!(back.u()[i], prof.u()[i], max_relative = 1e-12);
            assert_relative_eq!(back.ur()[i], prof.ur()[i], max_relative = 1e-12);
            assert_relative_eq!(back.flux()[i], prof.flux()[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn mismatched_parameters_are_rejected() {
        let params = ProblemParams::new(2.0, 2.0, 5.0).unwrap();
        let other = ProblemParams::new(2.0, 1.0, 5.0).unwrap();
        let prof = explicit_gelfand_singular(&params, &[1.0, 2.0]).unwrap();
        assert!(push_forward(&prof, &other).is_err());
        assert!(pull_back(&prof, &params).is_err());
    }
}
