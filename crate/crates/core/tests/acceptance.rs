//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Each check drives the public API directly and compares against values
//! obtained independently (closed forms, symbolic integration, plug-in
//! arithmetic). The binary exits with a nonzero status if any check fails.

use std::process::ExitCode;
use std::time::Instant;

use plap_core::estimates::{
    caccioppoli_power_sweep, decay_fit, gelfand_estimate_sweep, integral_estimate_audit,
    pohozaev_audit, pointwise_gap_audit, CutoffFamily, GelfandEstimate, PowerEstimate,
};
use plap_core::exponents::{
    classify_regime, decay_exponent, gelfand_upper_dimension, q_sharp, q_star, Verdict,
};
use plap_core::profile::log_grid;
use plap_core::radial_solver::{
    closed_form_residual, explicit_critical_solution, explicit_gelfand_singular, solve_ivp,
    ClosedForm, SolverConfig,
};
use plap_core::stability::{hardy_stability_check, morse_index_estimate};
use plap_core::transform::{push_forward, solve_transformed, TransformedProblem};
use plap_core::{Nonlinearity, ProblemParams, RadialProfile};

type Check = Result<String, String>;
type NamedCheck = (&'static str, fn() -> Check);

fn params(p: f64, alpha: f64, n: f64) -> ProblemParams {
    ProblemParams::new(p, alpha, n).expect("valid parameters")
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn lane_emden_shot(alpha: f64, r_max: f64) -> Result<RadialProfile, String> {
    solve_ivp(
        &params(2.0, alpha, 12.0),
        &Nonlinearity::lane_emden(5.0).map_err(err)?,
        1.0,
        &SolverConfig::new(r_max).with_r_start(1e-4),
    )
    .map_err(err)
}

fn gelfand_singular(hi: f64, nodes: usize) -> Result<RadialProfile, String> {
    explicit_gelfand_singular(&params(2.0, 0.0, 11.0), &log_grid(1e-3, hi, nodes)).map_err(err)
}

/// Gelfand window (2, 10), q^# = 2 and q* = 4 at p = 2, α = 0.
fn exponent_exactness() -> Check {
    let upper = gelfand_upper_dimension(2.0, 0.0).map_err(err)?;
    let inside = classify_regime(&params(2.0, 0.0, 9.0), &Nonlinearity::gelfand()).map_err(err)?;
    let sharp = q_sharp(&params(2.0, 0.0, 5.0), -2.0).map_err(err)?;
    let star = q_star(&params(2.0, 0.0, 5.0), 3.0).map_err(err)?;
    ensure(
        (upper - 10.0).abs() <= 1e-12
            && inside.window_lower == 2.0
            && (inside.window_upper - 10.0).abs() <= 1e-12
            && inside.verdict == Verdict::NonexistenceFiniteMorseRadial
            && (sharp - 2.0).abs() <= 1e-12
            && (star - 4.0).abs() <= 1e-12,
        format!(
            "window = ({}, {upper}), q_sharp = {sharp}, q_star = {star}",
            inside.window_lower
        ),
    )
}

/// sign(N_p(α)) = sign(4(p+α)/(p-1) + p - n) on a 500-point grid.
fn sign_law() -> Check {
    let mut violations = 0;
    let mut count = 0;
    for i in 0..5 {
        let p = 2.0 + 0.5 * i as f64;
        for j in 0..10 {
            let alpha = j as f64 / 3.0;
            let n_lo = p.max(1.0 - alpha + alpha / p);
            for k in 0..10 {
                // irrational offsets keep the grid away from the borderline n
                let n = n_lo + (30.0 - n_lo) * (k as f64 + 0.5 / std::f64::consts::SQRT_2) / 10.0;
                let exponent = decay_exponent(&params(p, alpha, n)).map_err(err)?;
                let predictor = 4.0 * (p + alpha) / (p - 1.0) + p - n;
                count += 1;
                if exponent.signum() != predictor.signum() {
                    violations += 1;
                }
            }
        }
    }
    ensure(
        count == 500 && violations == 0,
        format!("{violations} violations on {count} points"),
    )
}

/// Direct and transformed Gelfand solves agree on s ∈ [0.01, 50].
fn change_of_variables() -> Check {
    let source = params(2.0, 2.0, 5.0);
    let nl = Nonlinearity::gelfand();
    let tp = TransformedProblem::new(&source).map_err(err)?;
    if (tp.target.n - 3.5).abs() > 1e-14 || (tp.scale - 0.25).abs() > 1e-15 {
        return Err(format!("target N = {}, scale = {}", tp.target.n, tp.scale));
    }
    let direct = solve_ivp(&source, &nl, 0.0, &SolverConfig::new(20.0)).map_err(err)?;
    let image = push_forward(&direct, &source).map_err(err)?;
    let transformed =
        solve_transformed(&source, &nl, 0.0, &SolverConfig::new(400.0)).map_err(err)?;
    let mut worst = 0.0f64;
    for s in log_grid(0.01, 50.0, 500) {
        let a = image.sample(s).map_err(err)?.u;
        let b = transformed.sample(s).map_err(err)?.u;
        worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
    }
    ensure(
        worst <= 1e-6,
        format!("max relative discrepancy {worst:.3e}"),
    )
}

/// u_ε and the singular Gelfand solution solve the flux form to 1e-8.
fn closed_form_residuals() -> Check {
    let radii = log_grid(0.1, 100.0, 50);
    let critical = ClosedForm::critical(&params(2.0, 0.0, 4.0), 3.0, 1.0).map_err(err)?;
    let singular = ClosedForm::gelfand_singular(&params(2.0, 0.0, 11.0)).map_err(err)?;
    let rc = closed_form_residual(
        &critical,
        &Nonlinearity::lane_emden(3.0).map_err(err)?,
        &radii,
    );
    let rs = closed_form_residual(&singular, &Nonlinearity::gelfand(), &radii);
    // the closed form itself: u_ε(1) = √8 / 2
    let (u1, _, _) = critical.eval(1.0);
    ensure(
        rc.max_residual <= 1e-8 && rs.max_residual <= 1e-8 && (u1 - 2f64.sqrt()).abs() < 1e-15,
        format!(
            "u_eps {:.3e}, gelfand singular {:.3e}",
            rc.max_residual, rs.max_residual
        ),
    )
}

/// Five-term identity on u_ε truncated at R = 20.
fn pohozaev() -> Check {
    let profile = explicit_critical_solution(
        &params(2.0, 0.0, 4.0),
        3.0,
        1.0,
        &log_grid(1e-3, 40.0, 1200),
    )
    .map_err(err)?;
    let rep = pohozaev_audit(&profile, 3.0, 20.0).map_err(err)?;
    // symbolic values of the two bulk terms
    let bulk_ok = (rep.bulk_nonlinear / 105.2738 - 1.0).abs() < 1e-6
        && (rep.bulk_gradient / 104.4901 - 1.0).abs() < 1e-6;
    ensure(
        rep.relative_defect <= 1e-5 && rep.balance_coefficient.abs() <= 1e-12 && bulk_ok,
        format!(
            "defect {:.3e}, balance {:.1e}, bulk terms {:.6} / {:.6}",
            rep.relative_defect, rep.balance_coefficient, rep.bulk_nonlinear, rep.bulk_gradient
        ),
    )
}

/// Gelfand shots for n = 3..9 are unstable; the n = 11 singular solution is not.
fn instability_certificates() -> Check {
    let nl = Nonlinearity::gelfand();
    let mut counts = Vec::new();
    for n in 3..=9 {
        let profile = solve_ivp(
            &params(2.0, 0.0, n as f64),
            &nl,
            0.0,
            &SolverConfig::new(200.0),
        )
        .map_err(err)?;
        counts.push(
            morse_index_estimate(&profile, &nl, (0.01, 200.0), 4000)
                .map_err(err)?
                .negative_count,
        );
    }
    let singular =
        explicit_gelfand_singular(&params(2.0, 0.0, 11.0), &log_grid(0.005, 300.0, 3000))
            .map_err(err)?;
    let n11 = morse_index_estimate(&singular, &nl, (0.01, 200.0), 4000).map_err(err)?;
    ensure(
        counts.iter().all(|&c| c >= 1) && n11.negative_count == 0,
        format!(
            "negative counts n=3..9: {counts:?}, n=11 singular: {}",
            n11.negative_count
        ),
    )
}

/// Hardy certificate for u_ε and a clean spectrum on [R0, 10 R0].
fn stability_outside_compact() -> Check {
    let base = params(2.0, 0.0, 4.0);
    let mut found = None;
    for r0 in (1..=100).map(|k| k as f64) {
        let cert = hardy_stability_check(&base, 3.0, 1.0, r0, 0.9).map_err(err)?;
        if cert.passed {
            found = Some(cert);
            break;
        }
    }
    let cert = found.ok_or("no radius up to 100 passes")?;
    // independent oracle: r² · 3u_ε² = 24 r²/(1+r²)² ≤ 0.9 first holds at r = 5
    let expected = (1..=100)
        .map(|k| k as f64)
        .find(|r| 24.0 * r * r / (1.0 + r * r).powi(2) <= 0.9);
    let r0 = cert.r0;
    let profile =
        explicit_critical_solution(&base, 3.0, 1.0, &log_grid(r0, 10.0 * r0, 2001)).map_err(err)?;
    let rep = morse_index_estimate(
        &profile,
        &Nonlinearity::lane_emden(3.0).map_err(err)?,
        (r0, 10.0 * r0),
        2000,
    )
    .map_err(err)?;
    ensure(
        Some(r0) == expected && rep.negative_count == 0,
        format!(
            "R0 = {r0}, negative count on [R0, 10R0] = {}",
            rep.negative_count
        ),
    )
}

/// The bounded stable Lane-Emden shot decays like r^{-1/2}.
fn decay_law() -> Check {
    let profile = lane_emden_shot(0.0, 1e4)?;
    let le = Nonlinearity::lane_emden(5.0).map_err(err)?;
    let spectrum = morse_index_estimate(&profile, &le, (0.01, 200.0), 4000).map_err(err)?;
    let fit = decay_fit(&profile, (500.0, 5000.0), None).map_err(err)?;
    let bound = -4.0 + 11f64.sqrt();
    ensure(
        spectrum.negative_count == 0
            && (fit.fitted_slope + 0.5).abs() <= 0.05
            && fit.fitted_slope >= bound - 0.05
            && (fit.lower_bound - bound).abs() < 1e-12,
        format!(
            "slope {:.6}, lower bound {:.6}",
            fit.fitted_slope, fit.lower_bound
        ),
    )
}

/// Right-hand sides of the cutoff estimates scale with the predicted powers.
fn cutoff_scaling() -> Check {
    let radii = [10.0, 20.0, 40.0, 80.0];
    let cut = CutoffFamily::ball(10.0, 2).map_err(err)?;
    let mut report = Vec::new();
    let mut ok = true;
    for alpha in [0.0, 1.0] {
        let profile = lane_emden_shot(alpha, 200.0)?;
        let sw = caccioppoli_power_sweep(
            &profile,
            5.0,
            1.0,
            &cut,
            PowerEstimate::CutoffGradient,
            &radii,
        )
        .map_err(err)?;
        // n - p(t+q)/(q-p+1) - α(t+p-1)/(q-p+1) = 12 - 3 - α/2
        let predicted = 9.0 - alpha / 2.0;
        ok &= (sw.slope_fit - predicted).abs() <= 0.02;
        report.push(format!(
            "power α={alpha}: {:.4} vs {predicted}",
            sw.slope_fit
        ));
    }
    let singular = gelfand_singular(200.0, 2000)?;
    for t in [0.2, 0.5] {
        let sw =
            gelfand_estimate_sweep(&singular, t, &cut, GelfandEstimate::CutoffGradient, &radii)
                .map_err(err)?;
        let predicted = 11.0 - 2.0 * (2.0 * t + 1.0);
        ok &= (sw.slope_fit - predicted).abs() <= 0.02;
        report.push(format!(
            "exponential t={t}: {:.4} vs {predicted}",
            sw.slope_fit
        ));
    }
    ensure(ok, report.join("; "))
}

/// Integral estimate and pointwise gap hold on two stable profiles.
fn stable_profile_audits() -> Check {
    let lane_emden = lane_emden_shot(0.0, 300.0)?;
    let singular = gelfand_singular(300.0, 3000)?;
    let mut failures = Vec::new();
    let mut audits = 0;
    for (label, profile) in [
        ("gelfand n=11", &singular),
        ("lane-emden n=12", &lane_emden),
    ] {
        let image = push_forward(profile, profile.params()).map_err(err)?;
        for (s, big_s) in [(2.0, 50.0), (5.0, 100.0)] {
            audits += 1;
            if !integral_estimate_audit(&image, s, big_s)
                .map_err(err)?
                .satisfied
            {
                failures.push(format!("{label} integral ({s}, {big_s})"));
            }
        }
        for (gamma, r) in [(2.0, 4.0), (3.0, 10.0)] {
            audits += 1;
            if !pointwise_gap_audit(profile, gamma, r)
                .map_err(err)?
                .satisfied
            {
                failures.push(format!("{label} gap ({gamma}, {r})"));
            }
        }
    }
    ensure(
        failures.is_empty(),
        format!("{audits} audits, failing: {failures:?}"),
    )
}

fn main() -> ExitCode {
    let checks: [NamedCheck; 10] = [
        ("exponent exactness", exponent_exactness),
        ("decay sign law", sign_law),
        ("change-of-variable equivalence", change_of_variables),
        ("closed-form residuals", closed_form_residuals),
        ("pohozaev audit", pohozaev),
        ("instability certificates", instability_certificates),
        ("stability outside a compact set", stability_outside_compact),
        ("decay law", decay_law),
        ("cutoff scaling exponents", cutoff_scaling),
        ("stable-profile estimate audits", stable_profile_audits),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
