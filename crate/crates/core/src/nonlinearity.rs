//! The nonlinearities F on the right-hand side of `-Δ_p u = |x|^α F(u)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ProblemParams;
use crate::quadrature;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied C¹ nonlinearity given as a consistent `(F, F')` pair.
#[derive(Clone)]
pub struct CustomNonlinearity {
    label: String,
    f: RealFn,
    df: RealFn,
}

impl fmt::Debug for CustomNonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomNonlinearity")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum NonlinearityKind {
    /// `F(u) = e^u`
    Gelfand,
    /// `F(u) = u^q`, `q > p - 1`
    LaneEmden {
        q: f64,
    },
    /// `F(u) = -u^q`, `q < 0`
    NegativeExponent {
        q: f64,
    },
    Custom(CustomNonlinearity),
}

/// A nonlinearity together with a constant positive multiplier.
///
/// The multiplier is 1 for the physical problems; the change of variables
/// produces the same nonlinearity multiplied by `(1 + α/p)^{-p}`.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    scale: f64,
}

/// Serializable description of a nonlinearity. Custom closures are recorded by
/// label only and cannot be reconstructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonlinearitySpec {
    Gelfand {
        #[serde(default = "one")]
        scale: f64,
    },
    LaneEmden {
        q: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    NegativeExponent {
        q: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Custom {
        label: String,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

const FD_SAMPLES: usize = 10;
const FD_REL_TOL: f64 = 1e-5;

impl Nonlinearity {
    pub fn gelfand() -> Self {
        Self {
            kind: NonlinearityKind::Gelfand,
            scale: 1.0,
        }
    }

    pub fn lane_emden(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 {
            return Err(Error::Domain(format!(
                "Lane-Emden exponent must be positive and finite, got q = {q}"
            )));
        }
        Ok(Self {
            kind: NonlinearityKind::LaneEmden { q },
            scale: 1.0,
        })
    }

    pub fn negative_exponent(q: f64) -> Result<Self> {
        if !q.is_finite() || q >= 0.0 {
            return Err(Error::Domain(format!(
                "negative-exponent nonlinearity requires q < 0, got q = {q}"
            )));
        }
        Ok(Self {
            kind: NonlinearityKind::NegativeExponent { q },
            scale: 1.0,
        })
    }

    /// Builds a custom nonlinearity. `F'` is compared against a central
    /// difference of `F` at ten points spread over `sample_range`.
    pub fn custom<F, DF>(
        label: impl Into<String>,
        f: F,
        df: DF,
        sample_range: (f64, f64),
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        DF: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let (lo, hi) = sample_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!(
                "invalid sample range ({lo}, {hi}) for custom nonlinearity"
            )));
        }
        for k in 0..FD_SAMPLES {
            let u = lo + (hi - lo) * (k as f64 + 0.5) / FD_SAMPLES as f64;
            let h = 1e-5 * u.abs().max(1.0);
            let fd = (f(u + h) - f(u - h)) / (2.0 * h);
            let exact = df(u);
            if !(fd.is_finite() && exact.is_finite()) {
                return Err(Error::Domain(format!(
                    "custom nonlinearity is not finite near u = {u}"
                )));
            }
            if (exact - fd).abs() > FD_REL_TOL * exact.abs().max(1.0) {
                return Err(Error::Domain(format!(
                    "F' inconsistent with F at u = {u}: F' = {exact:e}, finite difference = {fd:e}"
                )));
            }
        }
        Ok(Self {
            kind: NonlinearityKind::Custom(CustomNonlinearity {
                label: label.into(),
                f: Arc::new(f),
                df: Arc::new(df),
            }),
            scale: 1.0,
        })
    }

    /// Returns the same nonlinearity multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            kind: self.kind.clone(),
            scale: self.scale * factor,
        }
    }

    pub fn kind(&self) -> &NonlinearityKind {
        &self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Exponent `q` for the power nonlinearities.
    pub fn exponent(&self) -> Option<f64> {
        match self.kind {
            NonlinearityKind::LaneEmden { q } | NonlinearityKind::NegativeExponent { q } => Some(q),
            _ => None,
        }
    }

    pub fn tag(&self) -> &str {
        match &self.kind {
            NonlinearityKind::Gelfand => "gelfand",
            NonlinearityKind::LaneEmden { .. } => "lane_emden",
            NonlinearityKind::NegativeExponent { .. } => "negative_exponent",
            NonlinearityKind::Custom(c) => &c.label,
        }
    }

    /// Checks the exponent hypotheses that depend on `p`.
    pub fn check_params(&self, params: &ProblemParams) -> Result<()> {
        if let NonlinearityKind::LaneEmden { q } = self.kind {
            if q <= params.p - 1.0 {
                return Err(Error::Domain(format!(
                    "Lane-Emden nonlinearity requires q > p - 1 (q = {q}, p = {})",
                    params.p
                )));
            }
        }
        Ok(())
    }

    pub fn in_domain(&self, u: f64) -> bool {
        match self.kind {
            NonlinearityKind::Gelfand => u.is_finite() && u < 700.0,
            NonlinearityKind::LaneEmden { .. } => u.is_finite() && u >= 0.0,
            NonlinearityKind::NegativeExponent { .. } => u.is_finite() && u > 0.0,
            NonlinearityKind::Custom(ref c) => u.is_finite() && (c.f)(u).is_finite(),
        }
    }

    /// `scale · F(u)`; NaN outside the domain.
    pub fn value(&self, u: f64) -> f64 {
        let raw = match self.kind {
            NonlinearityKind::Gelfand => u.exp(),
            NonlinearityKind::LaneEmden { q } => {
                if u >= 0.0 {
                    u.powf(q)
                } else {
                    f64::NAN
                }
            }
            NonlinearityKind::NegativeExponent { q } => {
                if u > 0.0 {
                    -u.powf(q)
                } else {
                    f64::NAN
                }
            }
            NonlinearityKind::Custom(ref c) => (c.f)(u),
        };
        self.scale * raw
    }

    /// `scale · F'(u)`.
    pub fn derivative(&self, u: f64) -> f64 {
        let raw = match self.kind {
            NonlinearityKind::Gelfand => u.exp(),
            NonlinearityKind::LaneEmden { q } => {
                if u > 0.0 {
                    q * u.powf(q - 1.0)
                } else if u == 0.0 && q >= 1.0 {
                    if q == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    f64::NAN
                }
            }
            NonlinearityKind::NegativeExponent { q } => {
                if u > 0.0 {
                    -q * u.powf(q - 1.0)
                } else {
                    f64::NAN
                }
            }
            NonlinearityKind::Custom(ref c) => (c.df)(u),
        };
        self.scale * raw
    }

    /// `scale · 𝓕(u)` with `𝓕(t) = ∫_0^t F`.
    ///
    /// Gelfand uses `e^t - 1`; for the negative exponent with `q <= -1` the
    /// integral from 0 diverges and the antiderivative `-t^{q+1}/(q+1)`
    /// (or `-ln t` at `q = -1`) is used instead. Custom nonlinearities are
    /// integrated numerically.
    pub fn primitive(&self, u: f64) -> f64 {
        let raw = match self.kind {
            NonlinearityKind::Gelfand => u.exp_m1(),
            NonlinearityKind::LaneEmden { q } => {
                if u >= 0.0 {
                    u.powf(q + 1.0) / (q + 1.0)
                } else {
                    f64::NAN
                }
            }
            NonlinearityKind::NegativeExponent { q } => {
                if u <= 0.0 {
                    f64::NAN
                } else if q == -1.0 {
                    -u.ln()
                } else {
                    -u.powf(q + 1.0) / (q + 1.0)
                }
            }
            NonlinearityKind::Custom(ref c) => {
                let f = &c.f;
                quadrature::gauss_legendre_composite(|s| f(s), 0.0, u, 16, 8)
            }
        };
        self.scale * raw
    }

    pub fn to_spec(&self) -> NonlinearitySpec {
        let scale = self.scale;
        match &self.kind {
            NonlinearityKind::Gelfand => NonlinearitySpec::Gelfand { scale },
            NonlinearityKind::LaneEmden { q } => NonlinearitySpec::LaneEmden { q: *q, scale },
            NonlinearityKind::NegativeExponent { q } => {
                NonlinearitySpec::NegativeExponent { q: *q, scale }
            }
            NonlinearityKind::Custom(c) => NonlinearitySpec::Custom {
                label: c.label.clone(),
                scale,
            },
        }
    }

    pub fn from_spec(spec: &NonlinearitySpec) -> Result<Self> {
        let (nl, scale) = match *spec {
            NonlinearitySpec::Gelfand { scale } => (Self::gelfand(), scale),
            NonlinearitySpec::LaneEmden { q, scale } => (Self::lane_emden(q)?, scale),
            NonlinearitySpec::NegativeExponent { q, scale } => (Self::negative_exponent(q)?, scale),
            NonlinearitySpec::Custom { ref label, .. } => {
                return Err(Error::Config(format!(
                    "custom nonlinearity '{label}' cannot be reconstructed from its description"
                )))
            }
        };
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Config(format!(
                "nonlinearity scale must be positive, got {scale}"
            )));
        }
        Ok(nl.scaled(scale))
    }
}
