//! Radial cutoff functions for the integral estimates.
//!
//! Transitions use the smoothstep `S(x) = 3x² - 2x³`, which is `C¹` with
//! `max |S'| = 3/2`; the realised gradient bound is recorded in
//! [`CutoffFamily::gradient_constant`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `max_{[0,1]} |S'|` for the smoothstep transition.
pub const SMOOTHSTEP_SLOPE: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CutoffKind {
    /// `ζ_R`: 1 on `B_R`, 0 outside `B_{2R}`.
    Ball,
    /// `ξ_R`: 0 on `B_{R0+1}`, 1 on `B_R \ B_{R0+2}`, 0 outside `B_{2R}`.
    Annulus { r0: f64 },
}

/// A cutoff `φ` together with the power `m` applied in the estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffFamily {
    #[serde(flatten)]
    pub kind: CutoffKind,
    pub radius: f64,
    pub power: u32,
    /// `C` in `|∇φ| ≤ C/R` on `B_{2R} \ B_R` (and `|∇φ| ≤ C` on the inner
    /// transition of the annulus).
    pub gradient_constant: f64,
}

fn smoothstep(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        (0.0, 0.0)
    } else if x >= 1.0 {
        (1.0, 0.0)
    } else {
        (x * x * (3.0 - 2.0 * x), 6.0 * x * (1.0 - x))
    }
}

impl CutoffFamily {
    pub fn ball(radius: f64, power: u32) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!(
                "cutoff radius must be positive, got {radius}"
            )));
        }
        if power == 0 {
            return Err(Error::Config("cutoff power m must be at least 1".into()));
        }
        Ok(Self {
            kind: CutoffKind::Ball,
            radius,
            power,
            gradient_constant: SMOOTHSTEP_SLOPE,
        })
    }

    pub fn annulus(radius: f64, r0: f64, power: u32) -> Result<Self> {
        if !(r0 >= 0.0 && radius > r0 + 3.0) {
            return Err(Error::Config(format!(
                "annulus cutoff needs R > R0 + 3 (R = {radius}, R0 = {r0})"
            )));
        }
        let mut cut = Self::ball(radius, power)?;
        cut.kind = CutoffKind::Annulus { r0 };
        Ok(cut)
    }

    /// The same family at another radius.
    pub fn at_radius(&self, radius: f64) -> Result<Self> {
        match self.kind {
            CutoffKind::Ball => Self::ball(radius, self.power),
            CutoffKind::Annulus { r0 } => Self::annulus(radius, r0, self.power),
        }
    }

    /// `(φ(r), φ'(r))` for the base cutoff (without the power `m`).
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let big_r = self.radius;
        let (outer, d_outer) = if r <= big_r {
            (1.0, 0.0)
        } else {
            let (s, ds) = smoothstep((r - big_r) / big_r);
            (1.0 - s, -ds / big_r)
        };
        match self.kind {
            CutoffKind::Ball => (outer, d_outer),
            CutoffKind::Annulus { r0 } => {
                let (inner, d_inner) = smoothstep(r - r0 - 1.0);
                (inner * outer, d_inner * outer + inner * d_outer)
            }
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.eval(r).1
    }

    /// Closed support `[lo, hi]` of `φ`.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            CutoffKind::Ball => (0.0, 2.0 * self.radius),
            CutoffKind::Annulus { r0 } => (r0 + 1.0, 2.0 * self.radius),
        }
    }

    /// Intervals on which `φ'` may be nonzero.
    pub fn gradient_support(&self) -> Vec<(f64, f64)> {
        let outer = (self.radius, 2.0 * self.radius);
        match self.kind {
            CutoffKind::Ball => vec![outer],
            CutoffKind::Annulus { r0 } => vec![(r0 + 1.0, r0 + 2.0), outer],
        }
    }

    /// Radii where the piecewise definition changes.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            CutoffKind::Ball => vec![self.radius, 2.0 * self.radius],
            CutoffKind::Annulus { r0 } => {
                vec![r0 + 1.0, r0 + 2.0, self.radius, 2.0 * self.radius]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ball_cutoff_shape() {
        let c = CutoffFamily::ball(10.0, 2).unwrap();
        assert_eq!(c.value(3.0), 1.0);
        assert_eq!(c.value(10.0), 1.0);
        assert_relative_eq!(c.value(15.0), 0.5);
        assert_eq!(c.value(20.0), 0.0);
        assert_eq!(c.value(25.0), 0.0);
        assert_relative_eq!(c.derivative(15.0), -1.5 / 10.0);
    }

    #[test]
    fn gradient_bound_holds() {
        for cut in [
            CutoffFamily::ball(7.0, 1).unwrap(),
            CutoffFamily::annulus(12.0, 2.0, 3).unwrap(),
        ] {
            for i in 0..5000 {
                let r = 30.0 * i as f64 / 5000.0;
                let (v, dv) = cut.eval(r);
                assert!((0.0..=1.0).contains(&v));
                let bound = if r > cut.radius {
                    cut.gradient_constant / cut.radius
                } else {
                    cut.gradient_constant
                };
                assert!(dv.abs() <= bound * (1.0 + 1e-12), "r = {r}");
            }
        }
    }

    #[test]
    fn annulus_shape_and_guard() {
        let c = CutoffFamily::annulus(10.0, 2.0, 1).unwrap();
        assert_eq!(c.value(2.5), 0.0);
        assert_eq!(c.value(4.5), 1.0);
        assert_eq!(c.value(10.0), 1.0);
        assert_eq!(c.value(21.0), 0.0);
        assert!(CutoffFamily::annulus(5.0, 2.0, 1).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let c = CutoffFamily::annulus(10.0, 1.0, 1).unwrap();
        for r in [2.3, 2.8, 12.0, 17.5] {
            let h = 1e-6;
            let fd = (c.value(r + h) - c.value(r - h)) / (2.0 * h);
            assert_relative_eq!(c.derivative(r), fd, epsilon = 1e-8);
        }
    }
}
