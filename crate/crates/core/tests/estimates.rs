//! Estimate audits on stable and unstable profiles, and their robustness
//! under grid refinement.

use plap_core::estimates::{
    caccioppoli_power_audit, decay_fit, gap_constant, gelfand_estimate_sweep,
    integral_estimate_audit, pohozaev_audit, pointwise_gap_audit, power_t_window,
    strict_weight_comparison, CutoffFamily, GelfandEstimate, PowerEstimate, AUDIT_TOL,
};
use plap_core::exponents::decay_exponent;
use plap_core::profile::log_grid;
use plap_core::radial_solver::{
    explicit_critical_solution, explicit_gelfand_singular, solve_ivp, SolverConfig,
};
use plap_core::transform::push_forward;
use plap_core::{Nonlinearity, ProblemParams, RadialProfile};

fn lane_emden(alpha: f64, r_max: f64) -> RadialProfile {
    let params = ProblemParams::new(2.0, alpha, 12.0).unwrap();
    solve_ivp(
        &params,
        &Nonlinearity::lane_emden(5.0).unwrap(),
        1.0,
        &SolverConfig::new(r_max).with_r_start(1e-4),
    )
    .unwrap()
}

fn gelfand_singular(nodes: usize) -> RadialProfile {
    explicit_gelfand_singular(
        &ProblemParams::new(2.0, 0.0, 11.0).unwrap(),
        &log_grid(1e-3, 300.0, nodes),
    )
    .unwrap()
}

#[test]
fn pohozaev_terms_converge_under_refinement() {
    let params = ProblemParams::new(2.0, 0.0, 4.0).unwrap();
    let defect = |nodes| {
        let prof =
            explicit_critical_solution(&params, 3.0, 1.0, &log_grid(1e-3, 40.0, nodes)).unwrap();
        pohozaev_audit(&prof, 3.0, 20.0).unwrap()
    };
    let coarse = defect(300);
    let fine = defect(1200);
    assert!(fine.relative_defect <= coarse.relative_defect);
    assert!(fine.relative_defect <= 1e-5);
    // the balance coefficient vanishes exactly at the critical exponent
    assert_eq!(fine.balance_coefficient, 0.0);
}

#[test]
fn stable_audits_are_insensitive_to_the_grid() {
    let coarse = gelfand_singular(1500);
    let fine = gelfand_singular(6000);
    for (s, big_s) in [(2.0, 50.0), (5.0, 100.0)] {
        let a = integral_estimate_audit(&coarse, s, big_s).unwrap();
        let b = integral_estimate_audit(&fine, s, big_s).unwrap();
        assert!(a.satisfied && b.satisfied);
        assert!(
            (a.lhs - b.lhs).abs() <= 5e-3 * b.lhs,
            "{} vs {}",
            a.lhs,
            b.lhs
        );
        assert!((a.rhs - b.rhs).abs() <= 5e-3 * b.rhs);
    }
    let a = pointwise_gap_audit(&coarse, 2.0, 4.0).unwrap();
    let b = pointwise_gap_audit(&fine, 2.0, 4.0).unwrap();
    assert!((a.rhs - b.rhs).abs() <= 5e-3 * b.rhs);
}

#[test]
fn pointwise_gap_of_singular_solution_is_logarithmic() {
    // u = ln(2(n-2)) - 2 ln r, so u(r) - u(γr) = 2 ln γ exactly
    let prof = gelfand_singular(3000);
    for (gamma, r) in [(2.0, 4.0), (3.0, 10.0)] {
        let audit = pointwise_gap_audit(&prof, gamma, r).unwrap();
        assert!(
            (audit.rhs - 2.0 * f64::ln(gamma)).abs() <= 1e-9,
            "{audit:?}"
        );
        assert!(audit.satisfied);
    }
}

#[test]
fn gap_constant_uses_logarithm_at_the_critical_dimension() {
    // N = p + 2: the constant is (1 + α/p) ln γ
    let params = ProblemParams::new(2.0, 0.0, 4.0).unwrap();
    assert!((gap_constant(&params, 3.0).unwrap() - 3f64.ln()).abs() < 1e-14);
    let params = ProblemParams::new(2.0, 2.0, 8.0).unwrap();
    assert!(gap_constant(&params, 3.0).unwrap() > 0.0);
}

#[test]
fn weighted_lane_emden_audits() {
    let prof = lane_emden(1.0, 200.0);
    let image = push_forward(&prof, prof.params()).unwrap();
    assert_eq!(image.params().alpha, 0.0);
    assert!(
        integral_estimate_audit(&image, 2.0, 50.0)
            .unwrap()
            .satisfied
    );
    let cut = CutoffFamily::ball(10.0, 2).unwrap();
    let audit =
        caccioppoli_power_audit(&prof, 5.0, 1.0, &cut, PowerEstimate::SolutionGradient, None)
            .unwrap();
    assert!(audit.satisfied, "{audit:?}");
    assert!(audit.lhs <= audit.rhs * (1.0 + AUDIT_TOL));
    let annulus = CutoffFamily::annulus(20.0, 5.0, 2).unwrap();
    let strict = strict_weight_comparison(&prof, 5.0, 1.0, &annulus, 5.0).unwrap();
    assert!(strict.satisfied, "{strict:?}");
}

#[test]
fn exponential_sweep_on_the_singular_solution() {
    let prof = gelfand_singular(3000);
    let cut = CutoffFamily::ball(10.0, 2).unwrap();
    let sweep = gelfand_estimate_sweep(
        &prof,
        0.5,
        &cut,
        GelfandEstimate::SolutionGradient,
        &[10.0, 20.0, 40.0, 80.0],
    )
    .unwrap();
    assert!(sweep.all_satisfied());
    // for p = 2 the gradient weight is 1, so the right-hand side scales like
    // R^{n - 2(2t+1)} = R^7
    assert!((sweep.slope_fit - 7.0).abs() <= 0.02, "{}", sweep.slope_fit);
}

#[test]
fn power_window_brackets_one() {
    let (lo, hi) = power_t_window(2.0, 5.0).unwrap();
    assert_eq!(lo, 1.0);
    assert!(hi > 1.0);
    let (lo, hi) = power_t_window(2.0, -2.0).unwrap();
    assert!(lo < -1.0 && hi == -1.0);
    assert!(power_t_window(2.0, 0.5).is_err());
}

#[test]
fn stable_lane_emden_tail_respects_decay_bound() {
    let prof = lane_emden(0.0, 1e4);
    let fit = decay_fit(&prof, (500.0, 5000.0), None).unwrap();
    let params = ProblemParams::new(2.0, 0.0, 12.0).unwrap();
    // lower bound -4 + √11 ≈ -0.683, exceeded by the fitted -1/2
    assert!((fit.lower_bound - (-4.0 + 11f64.sqrt())).abs() < 1e-12);
    assert!(fit.respects_bound(1e-3));
    assert!((fit.fitted_slope + 0.5).abs() < 0.01);
    assert!(decay_exponent(&params).unwrap() < 0.0);
}
