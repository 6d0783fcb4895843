//! Compactly supported radial test functions.

use crate::error::{Error, Result};
use crate::profile::{RadialProfile, Sample};

/// A radial function `φ(r)` with compact support in `(lo, hi)`.
pub trait TestFunction: Send + Sync {
    fn support(&self) -> (f64, f64);
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
    /// Interior radii where the derivative may jump; integrals are split there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `∫ f(state, φ, φ') dr` over the support of `phi`, split at its breakpoints.
pub fn integrate_against<T, F>(profile: &RadialProfile, phi: &T, mut f: F) -> Result<f64>
where
    T: TestFunction + ?Sized,
    F: FnMut(&Sample, f64, f64) -> f64,
{
    let (lo, hi) = phi.support();
    if !(lo < hi) {
        return Ok(0.0);
    }
    if lo < profile.r_min() || hi > profile.r_max() {
        return Err(Error::Support {
            lo,
            hi,
            r_min: profile.r_min(),
            r_max: profile.r_max(),
        });
    }
    let mut cuts = vec![lo];
    cuts.extend(phi.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
    cuts.push(hi);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += profile.integrate(w[0], w[1], |s| f(s, phi.value(s.r), phi.derivative(s.r)))?;
    }
    Ok(total)
}

/// Standard `C^∞` bump `exp(1 - 1/(1-ξ²))` on `ξ ∈ (-1, 1)`: value and
/// derivative with respect to `ξ`.
fn bump(xi: f64) -> (f64, f64) {
    if xi.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let d = 1.0 - xi * xi;
    let v = (1.0 - 1.0 / d).exp();
    (v, v * (-2.0 * xi / (d * d)))
}

/// Smooth bump supported on `(lo, hi)`, either in `r` or in `ln r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub lo: f64,
    pub hi: f64,
    pub logarithmic: bool,
}

impl Bump {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            logarithmic: false,
        }
    }

    /// Bump in the variable `ln r`; requires `lo > 0`.
    pub fn log(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            logarithmic: true,
        }
    }

    fn xi(&self, r: f64) -> (f64, f64) {
        if self.logarithmic {
            let (a, b) = (self.lo.ln(), self.hi.ln());
            ((2.0 * r.ln() - a - b) / (b - a), 2.0 / ((b - a) * r))
        } else {
            (
                (2.0 * r - self.lo - self.hi) / (self.hi - self.lo),
                2.0 / (self.hi - self.lo),
            )
        }
    }
}

impl TestFunction for Bump {
    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
    fn value(&self, r: f64) -> f64 {
        bump(self.xi(r).0).0
    }
    fn derivative(&self, r: f64) -> f64 {
        let (xi, dxi) = self.xi(r);
        bump(xi).1 * dxi
    }
}

/// `r^{-decay}` times a logarithmic bump on `(lo, hi)`: the near-optimiser of
/// Hardy-type inequalities when `decay = (n-2)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyBump {
    pub bump: Bump,
    pub decay: f64,
}

impl HardyBump {
    pub fn new(lo: f64, hi: f64, decay: f64) -> Self {
        Self {
            bump: Bump::log(lo, hi),
            decay,
        }
    }
}

impl TestFunction for HardyBump {
    fn support(&self) -> (f64, f64) {
        self.bump.support()
    }
    fn value(&self, r: f64) -> f64 {
        r.powf(-self.decay) * self.bump.value(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        let w = r.powf(-self.decay);
        w * (self.bump.derivative(r) - self.decay / r * self.bump.value(r))
    }
}

/// Continuous piecewise-linear function on `nodes`, zero at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return Err(Error::Config(
                "piecewise-linear data has mismatched lengths".into(),
            ));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("piecewise-linear nodes must increase".into()));
        }
        Ok(Self { nodes, values })
    }

    fn segment(&self, r: f64) -> Option<usize> {
        if r < self.nodes[0] || r > self.nodes[self.nodes.len() - 1] {
            return None;
        }
        let i = self.nodes.partition_point(|&x| x <= r);
        Some(i.saturating_sub(1).min(self.nodes.len() - 2))
    }
}

impl TestFunction for PiecewiseLinear {
    fn support(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }
    fn value(&self, r: f64) -> f64 {
        match self.segment(r) {
            Some(i) => {
                let t = (r - self.nodes[i]) / (self.nodes[i + 1] - self.nodes[i]);
                self.values[i] + t * (self.values[i + 1] - self.values[i])
            }
            None => 0.0,
        }
    }
    fn derivative(&self, r: f64) -> f64 {
        match self.segment(r) {
            Some(i) => (self.values[i + 1] - self.values[i]) / (self.nodes[i + 1] - self.nodes[i]),
            None => 0.0,
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.nodes.clone()
    }
}

/// `c · φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled<T> {
    pub factor: f64,
    pub inner: T,
}

impl<T: TestFunction> TestFunction for Scaled<T> {
    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }
    fn value(&self, r: f64) -> f64 {
        self.factor * self.inner.value(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        self.factor * self.inner.derivative(r)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

/// The zero function on `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub lo: f64,
    pub hi: f64,
}

impl TestFunction for Zero {
    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
    fn value(&self, _r: f64) -> f64 {
        0.0
    }
    fn derivative(&self, _r: f64) -> f64 {
        0.0
    }
}
