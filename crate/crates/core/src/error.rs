use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// A formula or operation was evaluated outside its domain of definition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The centre series could not be formed (non-finite F(a) or F'(a)).
    #[error("series start failed: {0}")]
    SeriesFailure(String),

    #[error("step failure at r = {r:e} after {steps} steps: {reason}")]
    StepFailure {
        r: f64,
        steps: usize,
        reason: String,
    },

    /// The state left the domain of the nonlinearity.
    #[error("solution left the domain of F at r = {r:e} (u = {u:e})")]
    DomainExit { r: f64, u: f64 },

    #[error(
        "test function support ({lo:e}, {hi:e}) not inside profile range ({r_min:e}, {r_max:e})"
    )]
    Support {
        lo: f64,
        hi: f64,
        r_min: f64,
        r_max: f64,
    },

    #[error("singular assembly: {0}")]
    SingularAssembly(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("profile residual {residual:e} exceeds gate {gate:e}")]
    Gate { residual: f64, gate: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed profile data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error reflects a violated mathematical precondition (as opposed
    /// to a numerical failure or an I/O problem).
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::DomainExit { .. }
                | Error::Support { .. }
                | Error::Range(_)
                | Error::Gate { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
