//! Command-line grammar.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "plap",
    version,
    about = "Numerical laboratory for radial solutions of -Δ_p u = |x|^α F(u)"
)]
pub struct Cli {
    /// Manifest file receiving one JSON line per run that writes artifacts
    /// (default: `manifest.jsonl` next to the first output).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form exponents, dimension thresholds and regime verdicts.
    Exponents(ExponentsArgs),
    /// Shoot a radial solution from the centre.
    Solve(SolveArgs),
    /// Finite-element Morse-index lower bound of a stored profile.
    Stability(StabilityArgs),
    /// Map a stored profile to the unweighted problem in fractional dimension.
    Transform(TransformArgs),
    /// Audit one of the estimates satisfied by stable solutions.
    Audit(AuditArgs),
    /// Run the acceptance experiments and print PASS/FAIL per criterion.
    VerifyTheorems(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NlKind {
    Gelfand,
    LaneEmden,
    NegativeExponent,
}

/// Parameters `(p, α, n)` shared by several subcommands.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long)]
    pub n: f64,
}

/// `lo:hi` or `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub step: Option<f64>,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("cannot parse {t:?} in range {s:?}: {e}"))
        };
        let range = match parts.as_slice() {
            [lo, hi] => Range {
                lo: num(lo)?,
                hi: num(hi)?,
                step: None,
            },
            [lo, hi, step] => Range {
                lo: num(lo)?,
                hi: num(hi)?,
                step: Some(num(step)?),
            },
            _ => return Err(format!("expected lo:hi or lo:hi:step, got {s:?}")),
        };
        if !(range.hi > range.lo) {
            return Err(format!("range {s:?} must have hi > lo"));
        }
        if let Some(step) = range.step {
            if !(step > 0.0) {
                return Err(format!("range {s:?} must have a positive step"));
            }
        }
        Ok(range)
    }
}

impl Range {
    /// `lo, lo + step, …` up to `hi` inclusive (with a little slack for rounding).
    pub fn points(&self) -> Vec<f64> {
        let step = self.step.unwrap_or(1.0);
        let count = ((self.hi - self.lo) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.lo + step * i as f64).collect()
    }
}

#[derive(Debug, Args)]
pub struct ExponentsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Exponent of the power nonlinearity.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    /// Nonlinearity used for the regime verdict.
    #[arg(long, value_enum)]
    pub nl: Option<NlKind>,
    /// Sweep the dimension over `lo:hi:step`.
    #[arg(long, value_name = "LO:HI:STEP")]
    pub sweep_n: Option<Range>,
    /// Write the report JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the sweep CSV here (printed to stdout otherwise).
    #[arg(long)]
    pub sweep_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum)]
    pub nl: NlKind,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    /// Central value u(0).
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long)]
    pub rmax: f64,
    /// First radius of the integration (default 1e-6 · rmax).
    #[arg(long)]
    pub rstart: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    /// Profile CSV; the sidecar `<stem>.meta.json` is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long)]
    pub profile: PathBuf,
    /// Truncation interval `a:b`.
    #[arg(long, value_name = "A:B")]
    pub interval: Range,
    /// Number of finite elements.
    #[arg(long, default_value_t = 4000)]
    pub grid: usize,
    /// Nonlinearity, when the profile has no sidecar recording it.
    #[arg(long, value_enum)]
    pub nl: Option<NlKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    /// Problem parameters for profiles without a sidecar.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    /// SpectralReport JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of `index,eigenvalue`.
    #[arg(long)]
    pub eigen_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum)]
    pub nl: Option<NlKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    /// Transformed profile CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Residual report JSON (default `<out stem>.residual.json`).
    #[arg(long)]
    pub residual_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimateKind {
    /// Tail-integral estimate in transformed variables.
    Integral,
    /// Lower bound for |u(γr) - u(r)|.
    PointwiseGap,
    /// Cutoff estimate for power nonlinearities.
    Power,
    /// Cutoff estimate for the exponential nonlinearity.
    Exponential,
    /// Weighted versus constant-weight comparison outside a ball.
    StrictWeight,
    /// Five-term Pohozaev balance.
    Pohozaev,
    /// Tail decay exponent against its lower bound.
    Decay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    CutoffGradient,
    SolutionGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CutoffShape {
    Ball,
    Annulus,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long, value_enum)]
    pub estimate: EstimateKind,
    #[arg(long)]
    pub profile: PathBuf,
    /// Problem parameters for profiles without a sidecar.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    /// Lower end s of the integral estimate.
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    /// Upper end S of the integral estimate.
    #[arg(long, default_value_t = 50.0)]
    pub upper: f64,
    /// Ratio γ > 1 of the pointwise gap.
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    /// Radius r ≥ 1 of the pointwise gap.
    #[arg(long, default_value_t = 4.0)]
    pub r: f64,
    /// Exponent of the power nonlinearity (default: from the sidecar).
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    /// Exponent t of the cutoff estimates.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "cutoff-gradient")]
    pub variant: Variant,
    #[arg(long, value_enum, default_value = "ball")]
    pub cutoff: CutoffShape,
    /// Inner radius of annular cutoffs.
    #[arg(long, default_value_t = 0.0)]
    pub r0: f64,
    /// Cutoff power m.
    #[arg(long, default_value_t = 2)]
    pub power: u32,
    /// Cutoff radius (single audit) or Pohozaev radius.
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
    /// Comma-separated cutoff radii for a scaling sweep.
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<f64>,
    /// Explicit constant instead of calibration.
    #[arg(long)]
    pub constant: Option<f64>,
    /// Lower bound M of the weight for the strict-weight comparison.
    #[arg(long, default_value_t = 1.0)]
    pub weight_min: f64,
    /// Fit window `r1:r2` of the decay audit.
    #[arg(long, value_name = "R1:R2")]
    pub window: Option<Range>,
    /// Limit of u at infinity (extrapolated when omitted).
    #[arg(long, allow_hyphen_values = true)]
    pub u_inf: Option<f64>,
    /// Audit JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of the radius sweep.
    #[arg(long)]
    pub sweep_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run only criteria matching these ids, names or tags.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Machine-readable summary.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        let r: Range = "3:30:0.5".parse().unwrap();
        assert_eq!(r.points().len(), 55);
        assert_eq!(r.points()[54], 30.0);
        let r: Range = "0.01:200".parse().unwrap();
        assert_eq!((r.lo, r.hi, r.step), (0.01, 200.0, None));
        assert!("5:1".parse::<Range>().is_err());
        assert!("1:2:0".parse::<Range>().is_err());
        assert!("1".parse::<Range>().is_err());
    }

    #[test]
    fn grammar_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
