//! The reproducible experiment suite: ten numerical criteria, each backed by
//! the solver, stability and estimates modules.
//!
//! Criteria are selected by number, name or tag. Every run is deterministic.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimates::{
    caccioppoli_power_sweep, decay_fit, gelfand_estimate_sweep, integral_estimate_audit,
    pohozaev_audit, pointwise_gap_audit, CutoffFamily, GelfandEstimate, PowerEstimate,
};
use crate::exponents::{decay_exponent, gelfand_upper_dimension, q_sharp, q_star, ProblemParams};
use crate::nonlinearity::Nonlinearity;
use crate::profile::{log_grid, RadialProfile};
use crate::radial_solver::{
    closed_form_residual, explicit_critical_solution, explicit_gelfand_singular, solve_ivp,
    ClosedForm, SolverConfig,
};
use crate::stability::{morse_index_estimate, smallest_hardy_radius};
use crate::transform::{push_forward, solve_transformed};

/// A named measurement reported by a criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub tags: Vec<String>,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    /// Error message when the experiment could not be carried out.
    pub error: Option<String>,
    pub elapsed_seconds: f64,
}

impl CriterionResult {
    /// One `PASS`/`FAIL` line with the measured values.
    pub fn summary_line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let values: Vec<String> = self
            .measurements
            .iter()
            .map(|m| format!("{}={:.6e}", m.label, m.value))
            .collect();
        let mut line = format!(
            "{status} [{}] {}: {}",
            self.id,
            self.name,
            values.join(", ")
        );
        if let Some(err) = &self.error {
            line.push_str(&format!(" (error: {err})"));
        }
        line
    }
}

/// Measurements gathered by an experiment and its verdict.
#[derive(Debug, Default)]
struct Outcome {
    measurements: Vec<Measurement>,
    passed: bool,
}

impl Outcome {
    fn new() -> Self {
        Self {
            measurements: Vec::new(),
            passed: true,
        }
    }

    fn record(&mut self, label: impl Into<String>, value: f64) {
        self.measurements.push(Measurement {
            label: label.into(),
            value,
        });
    }

    /// Records `value` and requires `ok`.
    fn check(&mut self, label: impl Into<String>, value: f64, ok: bool) {
        self.record(label, value);
        self.passed &= ok;
    }
}

/// One experiment of the suite.
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub tags: &'static [&'static str],
    run: fn() -> Result<Outcome>,
}

impl Criterion {
    /// Whether `filter` names this criterion (by number, name or tag).
    pub fn matches(&self, filter: &str) -> bool {
        let f = filter.trim().to_ascii_lowercase();
        f == self.id.to_string() || f == self.name || self.tags.iter().any(|t| *t == f)
    }

    pub fn run(&self) -> CriterionResult {
        let start = Instant::now();
        let (passed, measurements, error) = match (self.run)() {
            Ok(o) => (o.passed, o.measurements, None),
            Err(e) => (false, Vec::new(), Some(e.to_string())),
        };
        CriterionResult {
            id: self.id,
            name: self.name.to_string(),
            tags: self.tags.iter().map(|t| t.to_string()).collect(),
            passed,
            measurements,
            error,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        }
    }
}

/// Every criterion, in order.
pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            name: "exponent-exactness",
            tags: &["exponents", "gelfand"],
            run: exponent_exactness,
        },
        Criterion {
            id: 2,
            name: "decay-sign-law",
            tags: &["exponents", "decay"],
            run: decay_sign_law,
        },
        Criterion {
            id: 3,
            name: "change-of-variables",
            tags: &["transform", "gelfand", "solver"],
            run: change_of_variables,
        },
        Criterion {
            id: 4,
            name: "closed-form-residuals",
            tags: &["solver", "closed-form", "gelfand", "lane-emden"],
            run: closed_form_residuals,
        },
        Criterion {
            id: 5,
            name: "pohozaev-identity",
            tags: &["estimates", "pohozaev", "lane-emden"],
            run: pohozaev_identity,
        },
        Criterion {
            id: 6,
            name: "instability-certificates",
            tags: &["stability", "gelfand", "morse"],
            run: instability_certificates,
        },
        Criterion {
            id: 7,
            name: "stability-outside-compact",
            tags: &["stability", "hardy", "lane-emden"],
            run: stability_outside_compact,
        },
        Criterion {
            id: 8,
            name: "decay-law",
            tags: &["decay", "lane-emden", "solver"],
            run: decay_law,
        },
        Criterion {
            id: 9,
            name: "cutoff-scaling",
            tags: &["estimates", "scaling", "gelfand", "lane-emden"],
            run: cutoff_scaling,
        },
        Criterion {
            id: 10,
            name: "stable-profile-audits",
            tags: &["estimates", "gelfand", "lane-emden"],
            run: stable_profile_audits,
        },
    ]
}

/// The criteria matching any of `filters` (all of them when empty).
pub fn select(filters: &[String]) -> Vec<Criterion> {
    criteria()
        .into_iter()
        .filter(|c| filters.is_empty() || filters.iter().any(|f| c.matches(f)))
        .collect()
}

/// Runs the given criteria sequentially.
pub fn run_criteria(criteria: &[Criterion]) -> Vec<CriterionResult> {
    criteria.iter().map(Criterion::run).collect()
}

/// Machine-readable summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub results: Vec<CriterionResult>,
    pub passed: usize,
    pub total: usize,
}

impl VerifySummary {
    pub fn new(results: Vec<CriterionResult>) -> Self {
        let passed = results.iter().filter(|r| r.passed).count();
        let total = results.len();
        Self {
            results,
            passed,
            total,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

// ---------------------------------------------------------------------------
// Shared fixtures

fn pp(p: f64, alpha: f64, n: f64) -> Result<ProblemParams> {
    ProblemParams::new(p, alpha, n)
}

/// The bounded Lane-Emden shot `u(0) = 1`, `p = 2`, `n = 12`, `q = 5`.
fn lane_emden_stable_shot(alpha: f64, r_max: f64) -> Result<RadialProfile> {
    let params = pp(2.0, alpha, 12.0)?;
    solve_ivp(
        &params,
        &Nonlinearity::lane_emden(5.0)?,
        1.0,
        &SolverConfig::new(r_max).with_r_start(1e-4),
    )
}

/// The singular Gelfand solution `ln(2(n-2)) - 2 ln r` for `p = 2`, `n = 11`.
fn gelfand_singular_n11(lo: f64, hi: f64, nodes: usize) -> Result<RadialProfile> {
    explicit_gelfand_singular(&pp(2.0, 0.0, 11.0)?, &log_grid(lo, hi, nodes))
}

// ---------------------------------------------------------------------------
// Experiments

fn exponent_exactness() -> Result<Outcome> {
    let mut o = Outcome::new();
    let base = pp(2.0, 0.0, 5.0)?;
    let upper = gelfand_upper_dimension(2.0, 0.0)?;
    o.check("gelfand_window_lower", base.p, base.p == 2.0);
    o.check("gelfand_window_upper", upper, (upper - 10.0).abs() <= 1e-12);
    let sharp = q_sharp(&base, -2.0)?;
    o.check("q_sharp", sharp, (sharp - 2.0).abs() <= 1e-12);
    let star = q_star(&base, 3.0)?;
    o.check("q_star_q3", star, (star - 4.0).abs() <= 1e-12);
    Ok(o)
}

fn decay_sign_law() -> Result<Outcome> {
    let mut o = Outcome::new();
    let mut violations = 0usize;
    let mut points = 0usize;
    // 5 × 10 × 10 grid over p ∈ [2, 4], α ∈ [0, 3] and admissible n < 30
    for i in 0..5 {
        let p = 2.0 + 2.0 * i as f64 / 4.0;
        for j in 0..10 {
            let alpha = 3.0 * j as f64 / 9.0;
            let n_lo = p.max(1.0 - alpha + alpha / p);
            for k in 0..10 {
                let n = n_lo + (30.0 - n_lo) * (k as f64 + 0.5) / 10.0;
                let params = pp(p, alpha, n)?;
                let exponent = decay_exponent(&params)?;
                let predictor = gelfand_upper_dimension(p, alpha)? - n;
                points += 1;
                if exponent.signum() != predictor.signum() {
                    violations += 1;
                }
            }
        }
    }
    o.record("grid_points", points as f64);
    o.check(
        "violations",
        violations as f64,
        violations == 0 && points == 500,
    );
    Ok(o)
}

fn change_of_variables() -> Result<Outcome> {
    let mut o = Outcome::new();
    let source = pp(2.0, 2.0, 5.0)?;
    let nl = Nonlinearity::gelfand();
    let direct = solve_ivp(&source, &nl, 0.0, &SolverConfig::new(20.0))?;
    let image = push_forward(&direct, &source)?;
    let transformed = solve_transformed(&source, &nl, 0.0, &SolverConfig::new(400.0))?;
    o.record("target_dimension", transformed.params().n);
    let mut worst = 0.0f64;
    for s in log_grid(0.01, 50.0, 400) {
        let a = image.sample(s)?.u;
        let b = transformed.sample(s)?.u;
        let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max((a - b).abs() / scale);
    }
    o.check("max_relative_discrepancy", worst, worst <= 1e-6);
    Ok(o)
}

fn closed_form_residuals() -> Result<Outcome> {
    let mut o = Outcome::new();
    let radii = log_grid(0.1, 100.0, 50);
    let critical = ClosedForm::critical(&pp(2.0, 0.0, 4.0)?, 3.0, 1.0)?;
    let rc = closed_form_residual(&critical, &critical.nonlinearity(), &radii);
    o.check(
        "critical_residual",
        rc.max_residual,
        rc.max_residual <= 1e-8,
    );
    let singular = ClosedForm::gelfand_singular(&pp(2.0, 0.0, 11.0)?)?;
    let rs = closed_form_residual(&singular, &singular.nonlinearity(), &radii);
    o.check(
        "gelfand_singular_residual",
        rs.max_residual,
        rs.max_residual <= 1e-8,
    );
    Ok(o)
}

fn pohozaev_identity() -> Result<Outcome> {
    let mut o = Outcome::new();
    let profile =
        explicit_critical_solution(&pp(2.0, 0.0, 4.0)?, 3.0, 1.0, &log_grid(1e-3, 40.0, 1200))?;
    let rep = pohozaev_audit(&profile, 3.0, 20.0)?;
    o.record("weak_residual", rep.weak_residual);
    o.check(
        "relative_defect",
        rep.relative_defect,
        rep.relative_defect <= 1e-5,
    );
    o.check(
        "balance_coefficient",
        rep.balance_coefficient,
        rep.balance_coefficient.abs() <= 1e-12,
    );
    o.record("energy_ratio", rep.energy_ratio);
    Ok(o)
}

fn instability_certificates() -> Result<Outcome> {
    let mut o = Outcome::new();
    let nl = Nonlinearity::gelfand();
    for n in 3..=9 {
        let params = pp(2.0, 0.0, n as f64)?;
        let profile = solve_ivp(&params, &nl, 0.0, &SolverConfig::new(200.0))?;
        let rep = morse_index_estimate(&profile, &nl, (0.01, 200.0), 4000)?;
        o.check(
            format!("negative_count_n{n}"),
            rep.negative_count as f64,
            rep.negative_count >= 1,
        );
    }
    let singular = gelfand_singular_n11(0.005, 300.0, 3000)?;
    let rep = morse_index_estimate(&singular, &nl, (0.01, 200.0), 4000)?;
    o.check(
        "negative_count_n11_singular",
        rep.negative_count as f64,
        rep.negative_count == 0,
    );
    o.record("lowest_eigenvalue_n11_singular", rep.min_rayleigh);
    Ok(o)
}

fn stability_outside_compact() -> Result<Outcome> {
    let mut o = Outcome::new();
    let params = pp(2.0, 0.0, 4.0)?;
    let candidates: Vec<f64> = (1..=100).map(|k| k as f64).collect();
    let Some(cert) = smallest_hardy_radius(&params, 3.0, 1.0, 0.9, &candidates)? else {
        o.check("hardy_radius", f64::NAN, false);
        return Ok(o);
    };
    o.check("hardy_radius", cert.r0, cert.passed && cert.r0 <= 100.0);
    o.record("delta_effective", cert.delta_effective);
    let profile =
        explicit_critical_solution(&params, 3.0, 1.0, &log_grid(cert.r0, 10.0 * cert.r0, 2001))?;
    let rep = morse_index_estimate(
        &profile,
        &Nonlinearity::lane_emden(3.0)?,
        (cert.r0, 10.0 * cert.r0),
        2000,
    )?;
    o.check(
        "negative_count",
        rep.negative_count as f64,
        rep.negative_count == 0,
    );
    Ok(o)
}

fn decay_law() -> Result<Outcome> {
    let mut o = Outcome::new();
    let profile = lane_emden_stable_shot(0.0, 1e4)?;
    let rep = morse_index_estimate(
        &profile,
        &Nonlinearity::lane_emden(5.0)?,
        (0.01, 200.0),
        4000,
    )?;
    o.check(
        "negative_count",
        rep.negative_count as f64,
        rep.negative_count == 0,
    );
    let fit = decay_fit(&profile, (500.0, 5000.0), None)?;
    o.record("u_infinity", fit.u_infinity);
    o.record("lower_bound", fit.lower_bound);
    o.check(
        "fitted_slope",
        fit.fitted_slope,
        (fit.fitted_slope + 0.5).abs() <= 0.05 && fit.respects_bound(0.05),
    );
    Ok(o)
}

fn cutoff_scaling() -> Result<Outcome> {
    let mut o = Outcome::new();
    let radii = [10.0, 20.0, 40.0, 80.0];
    let cut = CutoffFamily::ball(10.0, 2)?;
    for alpha in [0.0, 1.0] {
        let profile = lane_emden_stable_shot(alpha, 200.0)?;
        let sw = caccioppoli_power_sweep(
            &profile,
            5.0,
            1.0,
            &cut,
            PowerEstimate::CutoffGradient,
            &radii,
        )?;
        let err = sw.slope_error().unwrap_or(f64::INFINITY);
        o.check(
            format!("power_slope_alpha{alpha}"),
            sw.slope_fit,
            err <= 0.02,
        );
    }
    let singular = gelfand_singular_n11(1e-3, 200.0, 2000)?;
    for t in [0.2, 0.5] {
        let sw =
            gelfand_estimate_sweep(&singular, t, &cut, GelfandEstimate::CutoffGradient, &radii)?;
        let err = sw.slope_error().unwrap_or(f64::INFINITY);
        o.check(format!("exponential_slope_t{t}"), sw.slope_fit, err <= 0.02);
    }
    Ok(o)
}

fn stable_profile_audits() -> Result<Outcome> {
    let mut o = Outcome::new();
    let lane_emden = lane_emden_stable_shot(0.0, 300.0)?;
    let singular = gelfand_singular_n11(1e-3, 300.0, 3000)?;
    let cases: [(&str, &RadialProfile, Nonlinearity); 2] = [
        ("gelfand_n11", &singular, Nonlinearity::gelfand()),
        (
            "lane_emden_n12",
            &lane_emden,
            Nonlinearity::lane_emden(5.0)?,
        ),
    ];
    for (label, profile, nl) in cases {
        let rep = morse_index_estimate(profile, &nl, (0.01, 200.0), 4000)?;
        o.check(
            format!("{label}_negative_count"),
            rep.negative_count as f64,
            rep.negative_count == 0,
        );
        let image = push_forward(profile, profile.params())?;
        for (s, big_s) in [(2.0, 50.0), (5.0, 100.0)] {
            let audit = integral_estimate_audit(&image, s, big_s)?;
            o.check(
                format!("{label}_integral_ratio_{s}_{big_s}"),
                audit.lhs / audit.rhs,
                audit.satisfied,
            );
        }
        for (gamma, r) in [(2.0, 4.0), (3.0, 10.0)] {
            let audit = pointwise_gap_audit(profile, gamma, r)?;
            o.check(
                format!("{label}_gap_ratio_{gamma}_{r}"),
                audit.lhs / audit.rhs,
                audit.satisfied,
            );
        }
    }
    Ok(o)
}
