//! The change of variables `s = r^{1+α/p}` on solver output.

use plap_core::profile::log_grid;
use plap_core::radial_solver::{explicit_critical_solution, solve_ivp, SolverConfig};
use plap_core::transform::{equivalence_residual, pull_back, push_forward, TransformedProblem};
use plap_core::{Nonlinearity, ProblemParams};
use proptest::prelude::*;

#[test]
fn weighted_gelfand_shot_solves_the_transformed_equation() {
    let source = ProblemParams::new(2.0, 2.0, 5.0).unwrap();
    let nl = Nonlinearity::gelfand();
    let prof = solve_ivp(&source, &nl, 0.0, &SolverConfig::new(20.0)).unwrap();
    let rep = equivalence_residual(&source, &nl, &prof).unwrap();
    assert!(rep.max_residual <= 1e-5, "{rep:?}");
}

#[test]
fn unweighted_residual_is_the_source_residual() {
    let source = ProblemParams::new(2.0, 0.0, 4.0).unwrap();
    let nl = Nonlinearity::lane_emden(3.0).unwrap();
    let prof = explicit_critical_solution(&source, 3.0, 1.0, &log_grid(0.01, 50.0, 500)).unwrap();
    let direct = plap_core::radial_solver::pointwise_residual(&prof, &nl).unwrap();
    let through = equivalence_residual(&source, &nl, &prof).unwrap();
    assert_eq!(direct.max_residual, through.max_residual);
}

#[test]
fn monotonicity_is_preserved() {
    let source = ProblemParams::new(3.0, 1.5, 6.0).unwrap();
    let prof = solve_ivp(
        &source,
        &Nonlinearity::gelfand(),
        0.0,
        &SolverConfig::new(30.0),
    )
    .unwrap();
    let image = push_forward(&prof, &source).unwrap();
    assert!(prof.ur().iter().all(|&g| g <= 0.0));
    assert!(image.ur().iter().all(|&g| g <= 0.0));
    let tp = TransformedProblem::new(&source).unwrap();
    assert_eq!(image.params(), &tp.target);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn push_forward_then_pull_back_is_identity(
        p in 1.5f64..4.0,
        alpha in 0.0f64..3.0,
        n in 3.0f64..10.0,
    ) {
        let source = ProblemParams::new(p, alpha, n).unwrap();
        let prof = solve_ivp(&source, &Nonlinearity::gelfand(), 0.0, &SolverConfig::new(10.0)).unwrap();
        let back = pull_back(&push_forward(&prof, &source).unwrap(), &source).unwrap();
        for i in 0..prof.len() {
            prop_assert!((back.r()[i] - prof.r()[i]).abs() <= 1e-12 * prof.r()[i]);
            prop_assert_eq!(back.u()[i], prof.u()[i]);
            prop_assert!((back.ur()[i] - prof.ur()[i]).abs() <= 1e-12 * prof.ur()[i].abs().max(1e-300));
        }
    }
}
