//! Closed-form critical exponents and regime classification.
//!
//! Every formula is evaluated in double precision. Regime boundaries are
//! compared with a relative tolerance of [`CRITICAL_REL_TOL`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::{Nonlinearity, NonlinearityKind};

/// Relative tolerance used when testing `n` against a critical dimension.
pub const CRITICAL_REL_TOL: f64 = 1e-9;

/// The triple `(p, α, n)`; `n` may be fractional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub p: f64,
    pub alpha: f64,
    pub n: f64,
}

impl ProblemParams {
    /// Accepts any `p > 1` with `α + p > 0`. Values `p < 2` are usable but lie
    /// outside the standing assumption `p >= 2`; see [`Self::in_standard_range`].
    pub fn new(p: f64, alpha: f64, n: f64) -> Result<Self> {
        if !(p.is_finite() && alpha.is_finite() && n.is_finite()) {
            return Err(Error::Domain(format!(
                "parameters must be finite (p = {p}, alpha = {alpha}, n = {n})"
            )));
        }
        if p <= 1.0 {
            return Err(Error::Domain(format!("p must exceed 1, got {p}")));
        }
        if alpha + p <= 0.0 {
            return Err(Error::Domain(format!(
                "alpha + p must be positive (alpha = {alpha}, p = {p})"
            )));
        }
        Ok(Self { p, alpha, n })
    }

    /// `p >= 2`.
    pub fn in_standard_range(&self) -> bool {
        self.p >= 2.0
    }

    /// Lower admissibility bound `1 - α + α/p` of the radial decay theorems.
    pub fn admissible_lower_dimension(&self) -> f64 {
        1.0 - self.alpha + self.alpha / self.p
    }

    pub fn require_n_above_p(&self) -> Result<()> {
        if self.n <= self.p {
            return Err(Error::Domain(format!(
                "operation requires n > p (n = {}, p = {})",
                self.n, self.p
            )));
        }
        Ok(())
    }

    pub fn with_n(&self, n: f64) -> Self {
        Self { n, ..*self }
    }
}

fn check_alpha_p(p: f64, alpha: f64) -> Result<()> {
    if alpha + p <= 0.0 {
        return Err(Error::Domain(format!(
            "alpha + p must be positive (alpha = {alpha}, p = {p})"
        )));
    }
    Ok(())
}

/// `N_{α,p} = p(n+α)/(p+α)`.
pub fn fractional_dimension(params: &ProblemParams) -> Result<f64> {
    let ProblemParams { p, alpha, n } = *params;
    check_alpha_p(p, alpha)?;
    Ok(p * (n + alpha) / (p + alpha))
}

/// The decay exponent
/// `N_p(α) = (1/p)(1+α/p)(p + 2 - N_{α,p} + 2√((1/(p+α))(p(n-1)/(p-1) + α)))`.
///
/// The radicand equals `(N_{α,p} - 1)/(p - 1)`, so it is nonnegative exactly
/// when `n >= 1 - α + α/p`.
pub fn decay_exponent(params: &ProblemParams) -> Result<f64> {
    let ProblemParams { p, alpha, n } = *params;
    check_alpha_p(p, alpha)?;
    let radicand = (p * (n - 1.0) / (p - 1.0) + alpha) / (p + alpha);
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "negative radicand {radicand:e} in decay exponent (n = {n} < 1 - α + α/p)"
        )));
    }
    let big_n = fractional_dimension(params)?;
    Ok((1.0 / p) * (1.0 + alpha / p) * (p + 2.0 - big_n + 2.0 * radicand.sqrt()))
}

/// `4(p+α)/(p-1) + p`.
pub fn gelfand_upper_dimension(p: f64, alpha: f64) -> Result<f64> {
    if p <= 1.0 {
        return Err(Error::Domain(format!("p must exceed 1, got {p}")));
    }
    check_alpha_p(p, alpha)?;
    Ok(4.0 * (p + alpha) / (p - 1.0) + p)
}

/// The four dimension thresholds attached to a power nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerExponents {
    pub q_star: f64,
    pub q_sharp: f64,
    pub q_plus: f64,
    pub q_minus: f64,
}

fn power_denominator(p: f64, q: f64) -> Result<f64> {
    let d = q - p + 1.0;
    if d == 0.0 {
        return Err(Error::Domain(format!(
            "degenerate denominator q - p + 1 = 0 (q = {q}, p = {p})"
        )));
    }
    Ok(d)
}

/// `q_p^*(α) = p(q+α+1)/(q-p+1)`.
pub fn q_star(params: &ProblemParams, q: f64) -> Result<f64> {
    let ProblemParams { p, alpha, .. } = *params;
    let d = power_denominator(p, q)?;
    Ok(p * (q + alpha + 1.0) / d)
}

/// `q_p^#(α) = (p(q-1) + α(p-2))/(q-p+1)`.
pub fn q_sharp(params: &ProblemParams, q: f64) -> Result<f64> {
    let ProblemParams { p, alpha, .. } = *params;
    let d = power_denominator(p, q)?;
    Ok((p * (q - 1.0) + alpha * (p - 2.0)) / d)
}

/// `(q_p^+(α), q_p^-(α))`.
pub fn q_plus_minus(params: &ProblemParams, q: f64) -> Result<(f64, f64)> {
    let ProblemParams { p, alpha, .. } = *params;
    let d = power_denominator(p, q)?;
    let radicand = q * d;
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "negative radicand q(q - p + 1) = {radicand:e}; no real q± for 0 < q < p - 1"
        )));
    }
    let base = (q - 1.0) / d * p + (p - 2.0) / d * alpha;
    let root = radicand.sqrt();
    let lead = 2.0 * (p + alpha) / ((p - 1.0) * d);
    Ok((base + lead * (q + root), base + lead * (q - root)))
}

pub fn power_exponents(params: &ProblemParams, q: f64) -> Result<PowerExponents> {
    let (q_plus, q_minus) = q_plus_minus(params, q)?;
    Ok(PowerExponents {
        q_star: q_star(params, q)?,
        q_sharp: q_sharp(params, q)?,
        q_plus,
        q_minus,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub params: ProblemParams,
    pub q: Option<f64>,
    pub fractional_dimension: f64,
    pub decay_exponent: f64,
    pub gelfand_upper: f64,
    pub q_star: Option<f64>,
    pub q_sharp: Option<f64>,
    pub q_plus: Option<f64>,
    pub q_minus: Option<f64>,
}

/// Collects every closed form for `params` (and `q` when given). Thresholds
/// that are undefined for this `q` are reported as `None`.
pub fn exponent_report(params: &ProblemParams, q: Option<f64>) -> Result<ExponentReport> {
    let (q_star_v, q_sharp_v, q_plus_v, q_minus_v) = match q {
        Some(q) => {
            let pm = q_plus_minus(params, q).ok();
            (
                q_star(params, q).ok(),
                q_sharp(params, q).ok(),
                pm.map(|v| v.0),
                pm.map(|v| v.1),
            )
        }
        None => (None, None, None, None),
    };
    Ok(ExponentReport {
        params: *params,
        q,
        fractional_dimension: fractional_dimension(params)?,
        decay_exponent: decay_exponent(params)?,
        gelfand_upper: gelfand_upper_dimension(params.p, params.alpha)?,
        q_star: q_star_v,
        q_sharp: q_sharp_v,
        q_plus: q_plus_v,
        q_minus: q_minus_v,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NonexistenceFiniteMorseRadial,
    NonexistenceStable,
    CriticalExplicitFamily,
    OutsideTheorems,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub nonlinearity: String,
    pub window_lower: f64,
    pub window_upper: f64,
    pub verdict: Verdict,
    pub theorem_tag: String,
}

/// Whether `n` equals `target` up to [`CRITICAL_REL_TOL`].
pub fn is_critical(n: f64, target: f64) -> bool {
    (n - target).abs() <= CRITICAL_REL_TOL * target.abs().max(1.0)
}

/// Classifies `params` against the nonexistence windows of the three model
/// nonlinearities. Stable-nonexistence windows have no lower dimension bound
/// and report `window_lower = 0`.
pub fn classify_regime(params: &ProblemParams, nl: &Nonlinearity) -> Result<RegimeReport> {
    let n = params.n;
    let report = |lo: f64, hi: f64, verdict: Verdict, tag: &str| RegimeReport {
        nonlinearity: nl.tag().to_string(),
        window_lower: lo,
        window_upper: hi,
        verdict,
        theorem_tag: tag.to_string(),
    };
    match *nl.kind() {
        NonlinearityKind::Gelfand => {
            let upper = gelfand_upper_dimension(params.p, params.alpha)?;
            Ok(if params.p < n && n < upper {
                report(
                    params.p,
                    upper,
                    Verdict::NonexistenceFiniteMorseRadial,
                    "gelfand/finite-morse-radial",
                )
            } else if n < upper {
                report(0.0, upper, Verdict::NonexistenceStable, "gelfand/stable")
            } else {
                report(params.p, upper, Verdict::OutsideTheorems, "none")
            })
        }
        NonlinearityKind::LaneEmden { q } => {
            nl.check_params(params)?;
            let star = q_star(params, q)?;
            let (plus, _) = q_plus_minus(params, q)?;
            Ok(if is_critical(n, star) {
                report(
                    star,
                    star,
                    Verdict::CriticalExplicitFamily,
                    "lane-emden/critical",
                )
            } else if star < n && n < plus {
                report(
                    star,
                    plus,
                    Verdict::NonexistenceFiniteMorseRadial,
                    "lane-emden/finite-morse-radial",
                )
            } else if n < plus {
                report(0.0, plus, Verdict::NonexistenceStable, "lane-emden/stable")
            } else {
                report(star, plus, Verdict::OutsideTheorems, "none")
            })
        }
        NonlinearityKind::NegativeExponent { q } => {
            let sharp = q_sharp(params, q)?;
            let (_, minus) = q_plus_minus(params, q)?;
            Ok(if sharp < n && n < minus {
                report(
                    sharp,
                    minus,
                    Verdict::NonexistenceFiniteMorseRadial,
                    "negative-exponent/finite-morse-radial",
                )
            } else if n < minus {
                report(
                    0.0,
                    minus,
                    Verdict::NonexistenceStable,
                    "negative-exponent/stable",
                )
            } else {
                report(sharp, minus, Verdict::OutsideTheorems, "none")
            })
        }
        NonlinearityKind::Custom(_) => Ok(report(0.0, 0.0, Verdict::OutsideTheorems, "none")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pp(p: f64, alpha: f64, n: f64) -> ProblemParams {
        ProblemParams::new(p, alpha, n).unwrap()
    }

    #[test]
    fn fractional_dimension_examples() {
        assert_eq!(fractional_dimension(&pp(2.0, 0.0, 10.0)).unwrap(), 10.0);
        assert_relative_eq!(fractional_dimension(&pp(2.0, 2.0, 5.0)).unwrap(), 3.5);
        assert_eq!(fractional_dimension(&pp(3.0, 0.0, 7.0)).unwrap(), 7.0);
    }

    #[test]
    fn decay_exponent_examples() {
        assert!(decay_exponent(&pp(2.0, 0.0, 10.0)).unwrap().abs() < 1e-15);
        // (1/2)(-8 + 2√11)
        assert_relative_eq!(
            decay_exponent(&pp(2.0, 0.0, 12.0)).unwrap(),
            -0.683_375_209_644_600_2,
            max_relative = 1e-14
        );
        // (1/2)(1 + 2√2)
        assert_relative_eq!(
            decay_exponent(&pp(2.0, 0.0, 3.0)).unwrap(),
            1.914_213_562_373_095,
            max_relative = 1e-14
        );
    }

    #[test]
    fn decay_exponent_rejects_negative_radicand() {
        // 1 - α + α/p = -1 for p = 2, α = 4
        let params = ProblemParams::new(2.0, 4.0, -1.5).unwrap();
        assert!(matches!(decay_exponent(&params), Err(Error::Domain(_))));
        assert!(decay_exponent(&ProblemParams::new(2.0, 4.0, -1.0).unwrap()).is_ok());
    }

    #[test]
    fn gelfand_upper_examples() {
        assert_eq!(gelfand_upper_dimension(2.0, 0.0).unwrap(), 10.0);
        assert_eq!(gelfand_upper_dimension(2.0, 2.0).unwrap(), 18.0);
        assert_eq!(gelfand_upper_dimension(3.0, 0.0).unwrap(), 9.0);
        assert!(gelfand_upper_dimension(1.0, 0.0).is_err());
    }

    #[test]
    fn power_exponent_examples() {
        let params = pp(2.0, 0.0, 4.0);
        assert_eq!(q_star(&params, 3.0).unwrap(), 4.0);
        assert_eq!(q_sharp(&params, -2.0).unwrap(), 2.0);
        let (plus, _) = q_plus_minus(&params, 5.0).unwrap();
        assert_relative_eq!(plus, 2.0 + 5.0 + 20f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(plus, 11.472_135_954_999_58, max_relative = 1e-14);
    }

    #[test]
    fn power_exponent_errors() {
        let params = pp(2.0, 0.0, 4.0);
        let err = q_star(&params, 1.0).unwrap_err();
        assert!(err.to_string().contains("q - p + 1"));
        assert!(q_plus_minus(&params, 0.5).is_err());
        assert!(power_exponents(&params, 0.5).is_err());
    }

    #[test]
    fn alpha_zero_p_two_reductions() {
        for &q in &[1.5, 2.0, 3.0, 7.0] {
            let params = pp(2.0, 0.0, 5.0);
            let e = power_exponents(&params, q).unwrap();
            assert_relative_eq!(e.q_star, 2.0 * (q + 1.0) / (q - 1.0), max_relative = 1e-14);
            assert_relative_eq!(e.q_sharp, 2.0, max_relative = 1e-14);
            let root = (q * (q - 1.0)).sqrt();
            assert_relative_eq!(
                e.q_plus,
                2.0 + 4.0 * (q + root) / (q - 1.0),
                max_relative = 1e-14
            );
            assert_relative_eq!(
                e.q_minus,
                2.0 + 4.0 * (q - root) / (q - 1.0),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn classify_examples() {
        let gel = Nonlinearity::gelfand();
        let r = classify_regime(&pp(2.0, 0.0, 9.0), &gel).unwrap();
        assert_eq!(r.verdict, Verdict::NonexistenceFiniteMorseRadial);
        assert_eq!((r.window_lower, r.window_upper), (2.0, 10.0));

        let le = Nonlinearity::lane_emden(3.0).unwrap();
        let r = classify_regime(&pp(2.0, 0.0, 4.0), &le).unwrap();
        assert_eq!(r.verdict, Verdict::CriticalExplicitFamily);

        let r = classify_regime(&pp(2.0, 0.0, 15.0), &gel).unwrap();
        assert_eq!(r.verdict, Verdict::OutsideTheorems);
    }

    #[test]
    fn classify_stable_only_windows() {
        let gel = Nonlinearity::gelfand();
        let r = classify_regime(&pp(2.0, 0.0, 1.5), &gel).unwrap();
        assert_eq!(r.verdict, Verdict::NonexistenceStable);

        let le = Nonlinearity::lane_emden(3.0).unwrap();
        let r = classify_regime(&pp(2.0, 0.0, 3.0), &le).unwrap();
        assert_eq!(r.verdict, Verdict::NonexistenceStable);
        let r = classify_regime(&pp(2.0, 0.0, 8.0), &le).unwrap();
        assert_eq!(r.verdict, Verdict::NonexistenceFiniteMorseRadial);
        let r = classify_regime(&pp(2.0, 0.0, 13.0), &le).unwrap();
        assert_eq!(r.verdict, Verdict::OutsideTheorems);

        let mems = Nonlinearity::negative_exponent(-2.0).unwrap();
        let r = classify_regime(&pp(2.0, 0.0, 7.0), &mems).unwrap();
        assert_eq!(r.verdict, Verdict::NonexistenceFiniteMorseRadial);
        assert_eq!(r.window_lower, 2.0);
        let r = classify_regime(&pp(2.0, 0.0, 8.0), &mems).unwrap();
        assert_eq!(r.verdict, Verdict::OutsideTheorems);
    }

    #[test]
    fn critical_detection_uses_relative_tolerance() {
        let le = Nonlinearity::lane_emden(3.0).unwrap();
        let r = classify_regime(&pp(2.0, 0.0, 4.0 + 1e-10), &le).unwrap();
        assert_eq!(r.verdict, Verdict::CriticalExplicitFamily);
        let r = classify_regime(&pp(2.0, 0.0, 4.0 + 1e-6), &le).unwrap();
        assert_ne!(r.verdict, Verdict::CriticalExplicitFamily);
    }

    #[test]
    fn report_omits_undefined_thresholds() {
        let rep = exponent_report(&pp(2.0, 0.0, 5.0), Some(0.5)).unwrap();
        assert!(rep.q_star.is_some());
        assert!(rep.q_plus.is_none() && rep.q_minus.is_none());
    }

    proptest! {
        #[test]
        fn q_plus_minus_ordering_follows_denominator_sign(
            p in 2.0f64..4.0,
            alpha in 0.0f64..3.0,
            q in prop_oneof![-6.0f64..-0.05, 0.0f64..8.0],
        ) {
            let params = pp(p, alpha, 5.0);
            let q = if q >= 0.0 { p - 1.0 + 0.05 + q } else { q };
            let (plus, minus) = q_plus_minus(&params, q).unwrap();
            if q > p - 1.0 {
                prop_assert!(minus <= plus);
            } else {
                prop_assert!(plus <= minus);
            }
        }

        #[test]
        fn fractional_dimension_increasing_in_n(
            p in 1.5f64..5.0,
            alpha in -1.0f64..4.0,
            n in 0.0f64..40.0,
            dn in 1e-6f64..10.0,
        ) {
            let a = fractional_dimension(&pp(p, alpha, n)).unwrap();
            let b = fractional_dimension(&pp(p, alpha, n + dn)).unwrap();
            prop_assert!(b > a);
            let id = fractional_dimension(&pp(p, 0.0, n)).unwrap();
            prop_assert!((id - n).abs() <= 1e-12 * n.abs().max(1.0));
        }
    }
}
