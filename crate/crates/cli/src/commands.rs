//! Subcommand implementations. Each returns the artifact paths it wrote so the
//! caller can record them in the run manifest.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use plap_core::estimates::{
    caccioppoli_power_audit, caccioppoli_power_sweep, decay_fit, gelfand_estimate_audit,
    gelfand_estimate_sweep, integral_estimate_audit, integral_estimate_audit_with_constant,
    pohozaev_audit, pointwise_gap_audit, strict_weight_comparison, CutoffFamily, GelfandEstimate,
    PowerEstimate, ScalingSweep,
};
use plap_core::exponents::{
    classify_regime, decay_exponent, exponent_report, ExponentReport, RegimeReport,
};
use plap_core::io::{
    format_value, read_profile, sidecar_path, versioned_json, write_json, write_profile,
    write_table,
};
use plap_core::radial_solver::{solve_ivp, ResidualReport, SolverConfig};
use plap_core::stability::morse_index_estimate;
use plap_core::transform::{equivalence_residual, push_forward, TransformedProblem};
use plap_core::verify::{select, VerifySummary};
use plap_core::{Nonlinearity, NonlinearitySpec, ProblemParams, RadialProfile};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::{
    AuditArgs, CutoffShape, EstimateKind, ExponentsArgs, NlKind, SolveArgs, StabilityArgs,
    TransformArgs, Variant, VerifyArgs,
};

/// Exit status of a numerical failure (or of a failed verification).
pub const EXIT_NUMERIC: u8 = 1;
/// Exit status of malformed invocations and unreadable inputs.
pub const EXIT_USAGE: u8 = 2;
/// Exit status of violated mathematical preconditions.
pub const EXIT_DOMAIN: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(plap_core::Error),
    /// The command ran but its verdict is negative.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use plap_core::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_NUMERIC,
            CliError::Core(e) if e.is_domain() => EXIT_DOMAIN,
            CliError::Core(E::Config(_) | E::Format(_) | E::Io(_) | E::Csv(_) | E::Json(_)) => {
                EXIT_USAGE
            }
            CliError::Core(_) => EXIT_NUMERIC,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl From<plap_core::Error> for CliError {
    fn from(e: plap_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a command reports back for the manifest.
pub struct RunRecord {
    pub command: &'static str,
    pub params: Option<ProblemParams>,
    pub nonlinearity: Option<NonlinearitySpec>,
    pub config: serde_json::Value,
    pub outputs: Vec<PathBuf>,
}

fn nonlinearity(kind: NlKind, q: Option<f64>) -> CliResult<Nonlinearity> {
    let need_q = || q.ok_or_else(|| CliError::Usage(format!("--nl {kind:?} requires --q")));
    Ok(match kind {
        NlKind::Gelfand => Nonlinearity::gelfand(),
        NlKind::LaneEmden => Nonlinearity::lane_emden(need_q()?)?,
        NlKind::NegativeExponent => Nonlinearity::negative_exponent(need_q()?)?,
    })
}

/// The nonlinearity from the flags, else from the profile sidecar.
fn profile_nonlinearity(
    profile: &RadialProfile,
    kind: Option<NlKind>,
    q: Option<f64>,
) -> CliResult<Nonlinearity> {
    if let Some(kind) = kind {
        return nonlinearity(kind, q);
    }
    match &profile.meta().nonlinearity {
        Some(spec) => Ok(Nonlinearity::from_spec(spec)?),
        None => Err(CliError::Usage(
            "the profile does not record its nonlinearity; pass --nl".into(),
        )),
    }
}

fn optional_params(
    p: Option<f64>,
    alpha: Option<f64>,
    n: Option<f64>,
) -> CliResult<Option<ProblemParams>> {
    match (p, n) {
        (Some(p), Some(n)) => Ok(Some(ProblemParams::new(p, alpha.unwrap_or(0.0), n)?)),
        (None, None) if alpha.is_none() => Ok(None),
        _ => Err(CliError::Usage("--p and --n must be given together".into())),
    }
}

fn reject_degenerate_q(p: f64, q: Option<f64>) -> CliResult<()> {
    match q {
        Some(q) if q - p + 1.0 == 0.0 => Err(CliError::Usage(format!(
            "degenerate denominator q - p + 1 = 0 (q = {q}, p = {p}); the exponent thresholds are undefined"
        ))),
        _ => Ok(()),
    }
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// exponents

#[derive(Debug, Serialize)]
struct ExponentsOutput {
    #[serde(flatten)]
    report: ExponentReport,
    regime: Option<RegimeReport>,
}

pub const SWEEP_HEADER: &str = "n,N_p_alpha,verdict";

fn sweep_row(params: &ProblemParams, nl: &Nonlinearity) -> String {
    let exponent = decay_exponent(params)
        .map(format_value)
        .unwrap_or_else(|_| "NaN".into());
    let verdict = classify_regime(params, nl)
        .map(|r| format!("{:?}", r.verdict))
        .unwrap_or_else(|_| "Undefined".into());
    format!("{},{exponent},{verdict}", format_value(params.n))
}

pub fn exponents(args: &ExponentsArgs) -> CliResult<RunRecord> {
    let a = &args.params;
    reject_degenerate_q(a.p, args.q)?;
    let params = ProblemParams::new(a.p, a.alpha, a.n)?;
    let nl = args.nl.map(|k| nonlinearity(k, args.q)).transpose()?;
    let report = exponent_report(&params, args.q)?;
    let regime = nl
        .as_ref()
        .map(|nl| classify_regime(&params, nl))
        .transpose()?;
    let output = ExponentsOutput { report, regime };
    println!("{}", versioned_json(&output)?);

    let mut outputs = Vec::new();
    if let Some(path) = &args.out {
        write_json(path, &output)?;
        outputs.push(path.clone());
    }
    if let Some(range) = args.sweep_n {
        // the verdict column refers to the exponential problem unless told otherwise
        let sweep_nl = nl.clone().unwrap_or_else(Nonlinearity::gelfand);
        let mut text = String::from(SWEEP_HEADER);
        text.push('\n');
        for n in range.points() {
            text.push_str(&sweep_row(&params.with_n(n), &sweep_nl));
            text.push('\n');
        }
        match &args.sweep_out {
            Some(path) => {
                write_text(path, &text)?;
                outputs.push(path.clone());
            }
            None => print!("{text}"),
        }
    }
    Ok(RunRecord {
        command: "exponents",
        params: Some(params),
        nonlinearity: nl.map(|n| n.to_spec()),
        config: json!({ "q": args.q, "sweep_n": args.sweep_n.map(|r| [r.lo, r.hi, r.step.unwrap_or(1.0)]) }),
        outputs,
    })
}

// ---------------------------------------------------------------------------
// solve

pub fn solve(args: &SolveArgs) -> CliResult<RunRecord> {
    let a = &args.params;
    let params = ProblemParams::new(a.p, a.alpha, a.n)?;
    let nl = nonlinearity(args.nl, args.q)?;
    nl.check_params(&params)?;
    let mut config = SolverConfig::new(args.rmax).with_tolerances(args.rtol, args.atol);
    if let Some(r_start) = args.rstart {
        config = config.with_r_start(r_start);
    }
    let profile = solve_ivp(&params, &nl, args.a, &config)?;
    let last = profile.len() - 1;
    println!(
        "solved {} nodes on [{:e}, {:e}]; stop: {:?}; u(r_end) = {:.12e}, u_r(r_end) = {:.12e}",
        profile.len(),
        profile.r_min(),
        profile.r_max(),
        profile.meta().stop_reason,
        profile.u()[last],
        profile.ur()[last]
    );
    let mut outputs = Vec::new();
    if let Some(path) = &args.out {
        write_profile(path, &profile)?;
        outputs.push(path.clone());
        outputs.push(sidecar_path(path));
    }
    Ok(RunRecord {
        command: "solve",
        params: Some(params),
        nonlinearity: Some(nl.to_spec()),
        config: json!({ "a": args.a, "solver": config }),
        outputs,
    })
}

// ---------------------------------------------------------------------------
// stability

pub const EIGEN_HEADER: [&str; 2] = ["index", "eigenvalue"];

pub fn stability(args: &StabilityArgs) -> CliResult<RunRecord> {
    let given = optional_params(args.p, args.alpha, args.n)?;
    let profile = read_profile(&args.profile, given)?;
    let nl = profile_nonlinearity(&profile, args.nl, args.q)?;
    let report = morse_index_estimate(
        &profile,
        &nl,
        (args.interval.lo, args.interval.hi),
        args.grid,
    )?;
    println!(
        "interval [{}, {}], {} elements: negative count {}, lowest eigenvalue {:.6e} (spectral tol {:.1e})",
        report.interval[0],
        report.interval[1],
        report.grid_size,
        report.negative_count,
        report.min_rayleigh,
        report.spectral_tol
    );
    let mut outputs = Vec::new();
    if let Some(path) = &args.out {
        write_json(path, &report)?;
        outputs.push(path.clone());
    }
    if let Some(path) = &args.eigen_out {
        let rows: Vec<Vec<f64>> = report
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &v)| vec![i as f64, v])
            .collect();
        write_table(path, &EIGEN_HEADER, &rows)?;
        outputs.push(path.clone());
    }
    Ok(RunRecord {
        command: "stability",
        params: Some(*profile.params()),
        nonlinearity: Some(nl.to_spec()),
        config: json!({
            "profile": args.profile,
            "interval": [args.interval.lo, args.interval.hi],
            "grid": args.grid,
        }),
        outputs,
    })
}

// ---------------------------------------------------------------------------
// transform

#[derive(Debug, Serialize)]
struct TransformOutput {
    problem: TransformedProblem,
    residual: ResidualReport,
}

pub fn transform(args: &TransformArgs) -> CliResult<RunRecord> {
    let a = &args.params;
    let params = ProblemParams::new(a.p, a.alpha, a.n)?;
    let profile = read_profile(&args.profile, Some(params))?;
    let nl = profile_nonlinearity(&profile, args.nl, args.q)?;
    let problem = TransformedProblem::new(&params)?;
    let image = push_forward(&profile, &params)?;
    let residual = equivalence_residual(&params, &nl, &profile)?;
    println!(
        "target dimension N = {}, scale {:.6e}; transformed residual {:.3e} at s = {:.6e}",
        problem.target.n, problem.scale, residual.max_residual, residual.at_r
    );
    let output = TransformOutput { problem, residual };
    let mut outputs = Vec::new();
    if let Some(path) = &args.out {
        write_profile(path, &image)?;
        outputs.push(path.clone());
        outputs.push(sidecar_path(path));
    }
    let residual_path = args
        .residual_out
        .clone()
        .or_else(|| args.out.as_ref().map(|p| p.with_extension("residual.json")));
    match residual_path {
        Some(path) => {
            write_json(&path, &output)?;
            outputs.push(path);
        }
        None => println!("{}", versioned_json(&output)?),
    }
    Ok(RunRecord {
        command: "transform",
        params: Some(params),
        nonlinearity: Some(nl.to_spec()),
        config: json!({ "profile": args.profile }),
        outputs,
    })
}

// ---------------------------------------------------------------------------
// audit

pub const AUDIT_SWEEP_HEADER: [&str; 5] = ["R", "lhs", "rhs_integral", "rhs", "satisfied"];

fn cutoff(args: &AuditArgs, radius: f64) -> CliResult<CutoffFamily> {
    Ok(match args.cutoff {
        CutoffShape::Ball => CutoffFamily::ball(radius, args.power)?,
        CutoffShape::Annulus => CutoffFamily::annulus(radius, args.r0, args.power)?,
    })
}

fn power_exponent(args: &AuditArgs, profile: &RadialProfile) -> CliResult<f64> {
    if let Some(q) = args.q {
        return Ok(q);
    }
    profile
        .meta()
        .nonlinearity
        .as_ref()
        .and_then(|spec| Nonlinearity::from_spec(spec).ok())
        .and_then(|nl| nl.exponent())
        .ok_or_else(|| {
            CliError::Usage("this estimate needs --q (the profile does not record it)".into())
        })
}

fn sweep_rows(sweep: &ScalingSweep) -> Vec<Vec<f64>> {
    sweep
        .audits
        .iter()
        .enumerate()
        .map(|(i, a)| {
            vec![
                sweep.radii[i],
                sweep.lhs[i],
                sweep.rhs_integral[i],
                a.rhs,
                if a.satisfied { 1.0 } else { 0.0 },
            ]
        })
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> CliResult<serde_json::Value> {
    serde_json::to_value(value).map_err(|e| CliError::Core(e.into()))
}

/// Runs the selected audit and returns its JSON document plus sweep rows.
fn run_audit(
    args: &AuditArgs,
    profile: &RadialProfile,
) -> CliResult<(serde_json::Value, Option<Vec<Vec<f64>>>)> {
    let sweep_result =
        |sweep: ScalingSweep| -> CliResult<_> {
            println!(
            "{} (t = {}): fitted slope {:.6} (predicted {}), constant {:.6e}, all satisfied: {}",
            sweep.name,
            sweep.params_t,
            sweep.slope_fit,
            sweep.slope_predicted.map_or("n/a".into(), |s| format!("{s:.6}")),
            sweep.constant,
            sweep.all_satisfied()
        );
            let rows = sweep_rows(&sweep);
            Ok((to_json(&sweep)?, Some(rows)))
        };
    let audit_result = |audit: plap_core::estimates::EstimateAudit| -> CliResult<_> {
        println!(
            "{}: lhs {:.6e} {} rhs {:.6e} (constant {:.6e})",
            audit.name,
            audit.lhs,
            if audit.satisfied { "<=" } else { ">" },
            audit.rhs,
            audit.constant_used
        );
        for note in &audit.notes {
            println!("  note: {note}");
        }
        Ok((to_json(&audit)?, None))
    };

    match args.estimate {
        EstimateKind::Integral => {
            let image = push_forward(profile, profile.params())?;
            let audit = match args.constant {
                Some(c) => integral_estimate_audit_with_constant(&image, args.s, args.upper, c)?,
                None => integral_estimate_audit(&image, args.s, args.upper)?,
            };
            audit_result(audit)
        }
        EstimateKind::PointwiseGap => {
            audit_result(pointwise_gap_audit(profile, args.gamma, args.r)?)
        }
        EstimateKind::Power => {
            let q = power_exponent(args, profile)?;
            let which = match args.variant {
                Variant::CutoffGradient => PowerEstimate::CutoffGradient,
                Variant::SolutionGradient => PowerEstimate::SolutionGradient,
            };
            if args.radii.is_empty() {
                let cut = cutoff(args, args.radius)?;
                audit_result(caccioppoli_power_audit(
                    profile,
                    q,
                    args.t,
                    &cut,
                    which,
                    args.constant,
                )?)
            } else {
                let cut = cutoff(args, args.radii[0])?;
                sweep_result(caccioppoli_power_sweep(
                    profile,
                    q,
                    args.t,
                    &cut,
                    which,
                    &args.radii,
                )?)
            }
        }
        EstimateKind::Exponential => {
            let which = match args.variant {
                Variant::CutoffGradient => GelfandEstimate::CutoffGradient,
                Variant::SolutionGradient => GelfandEstimate::SolutionGradient,
            };
            if args.radii.is_empty() {
                let cut = cutoff(args, args.radius)?;
                audit_result(gelfand_estimate_audit(
                    profile,
                    args.t,
                    &cut,
                    which,
                    args.constant,
                )?)
            } else {
                let cut = cutoff(args, args.radii[0])?;
                sweep_result(gelfand_estimate_sweep(
                    profile,
                    args.t,
                    &cut,
                    which,
                    &args.radii,
                )?)
            }
        }
        EstimateKind::StrictWeight => {
            let q = power_exponent(args, profile)?;
            let cut = cutoff(args, args.radius)?;
            audit_result(strict_weight_comparison(
                profile,
                q,
                args.t,
                &cut,
                args.weight_min,
            )?)
        }
        EstimateKind::Pohozaev => {
            let q = power_exponent(args, profile)?;
            let rep = pohozaev_audit(profile, q, args.radius)?;
            println!(
                "pohozaev on B_{}: bulk {:.6e} - {:.6e}, boundary {:.6e}; relative defect {:.3e}, balance {:.3e}",
                rep.radius,
                rep.bulk_nonlinear,
                rep.bulk_gradient,
                rep.rhs(),
                rep.relative_defect,
                rep.balance_coefficient
            );
            Ok((to_json(&rep)?, None))
        }
        EstimateKind::Decay => {
            let window = match args.window {
                Some(w) => (w.lo, w.hi),
                None => (profile.r_max() / 100.0, profile.r_max() / 2.0),
            };
            let fit = decay_fit(profile, window, args.u_inf)?;
            println!(
                "decay on [{:e}, {:e}]: fitted slope {:.6}, lower bound {:.6}, u_inf {:.6e}{}",
                fit.window[0],
                fit.window[1],
                fit.fitted_slope,
                fit.lower_bound,
                fit.u_infinity,
                if fit.log_branch {
                    " (logarithmic branch)"
                } else {
                    ""
                }
            );
            Ok((to_json(&fit)?, None))
        }
    }
}

pub fn audit(args: &AuditArgs) -> CliResult<RunRecord> {
    let given = optional_params(args.p, args.alpha, args.n)?;
    let profile = read_profile(&args.profile, given)?;
    let (doc, rows) = run_audit(args, &profile)?;
    let mut outputs = Vec::new();
    if let Some(path) = &args.out {
        write_json(path, &doc)?;
        outputs.push(path.clone());
    }
    if let Some(path) = &args.sweep_out {
        let rows = rows
            .ok_or_else(|| CliError::Usage("--sweep-out needs a radius sweep (--radii)".into()))?;
        write_table(path, &AUDIT_SWEEP_HEADER, &rows)?;
        outputs.push(path.clone());
    }
    Ok(RunRecord {
        command: "audit",
        params: Some(*profile.params()),
        nonlinearity: profile.meta().nonlinearity.clone(),
        config: json!({
            "estimate": format!("{:?}", args.estimate),
            "profile": args.profile,
            "s": args.s, "upper": args.upper, "gamma": args.gamma, "r": args.r,
            "q": args.q, "t": args.t,
            "variant": format!("{:?}", args.variant),
            "cutoff": format!("{:?}", args.cutoff), "r0": args.r0, "power": args.power,
            "radius": args.radius, "radii": args.radii, "constant": args.constant,
            "weight_min": args.weight_min,
            "window": args.window.map(|w| [w.lo, w.hi]), "u_inf": args.u_inf,
        }),
        outputs,
    })
}

// ---------------------------------------------------------------------------
// verify-theorems

pub fn verify(args: &VerifyArgs) -> CliResult<RunRecord> {
    let selected = select(&args.only);
    if selected.is_empty() {
        return Err(CliError::Usage(format!(
            "no criterion matches {:?}",
            args.only
        )));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let start = Instant::now();
    let results = pool.install(|| selected.par_iter().map(|c| c.run()).collect::<Vec<_>>());
    for r in &results {
        println!("{}", r.summary_line());
    }
    let summary = VerifySummary::new(results);
    println!(
        "{}/{} criteria passed in {:.2}s",
        summary.passed,
        summary.total,
        start.elapsed().as_secs_f64()
    );
    let mut outputs = Vec::new();
    if let Some(path) = &args.json {
        write_json(path, &summary)?;
        outputs.push(path.clone());
    }
    let record = RunRecord {
        command: "verify-theorems",
        params: None,
        nonlinearity: None,
        config: json!({ "only": args.only }),
        outputs,
    };
    if summary.all_passed() {
        Ok(record)
    } else {
        Err(CliError::Failed(format!(
            "{} of {} criteria failed",
            summary.total - summary.passed,
            summary.total
        )))
    }
}
