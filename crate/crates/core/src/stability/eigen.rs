//! Symmetric-definite tridiagonal pencils `A x = λ B x`.
//!
//! Eigenvalues are located by Sturm bisection: by Sylvester's law of inertia
//! the number of negative pivots in the `LDLᵀ` factorisation of `A - σB`
//! equals the number of eigenvalues below `σ`. Eigenvectors come from inverse
//! iteration.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag[i]`, `off[i]` couples `i` and `i+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// The pencil `(A, B)` with `B` positive definite.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub a: SymTridiagonal,
    pub b: SymTridiagonal,
}

impl Pencil {
    pub fn new(a: SymTridiagonal, b: SymTridiagonal) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::SingularAssembly(
                "pencil matrices must have equal positive size".into(),
            ));
        }
        Ok(Self { a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Symmetric diagonal scaling `D(A, B)D` with `D = diag(B)^{-1/2}`; leaves
    /// the spectrum unchanged and brings every row to unit mass.
    pub fn normalized(&self) -> (Self, Vec<f64>) {
        let d: Vec<f64> = self.b.diag.iter().map(|b| 1.0 / b.sqrt()).collect();
        let scale = |m: &SymTridiagonal| SymTridiagonal {
            diag: m.diag.iter().zip(&d).map(|(v, s)| v * s * s).collect(),
            off: m
                .off
                .iter()
                .enumerate()
                .map(|(i, v)| v * d[i] * d[i + 1])
                .collect(),
        };
        (
            Self {
                a: scale(&self.a),
                b: scale(&self.b),
            },
            d,
        )
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.len();
        let mut count = 0;
        let mut prev = 1.0;
        for i in 0..n {
            let mut piv = self.a.diag[i] - sigma * self.b.diag[i];
            if i > 0 {
                let e = self.a.off[i - 1] - sigma * self.b.off[i - 1];
                piv -= e * e / prev;
            }
            if piv == 0.0 {
                piv = -f64::EPSILON
                    * (self.a.diag[i].abs() + sigma.abs() * self.b.diag[i].abs())
                        .max(f64::MIN_POSITIVE);
            }
            if piv < 0.0 {
                count += 1;
            }
            prev = piv;
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection to relative
    /// precision `rel`.
    pub fn eigenvalue(&self, k: usize, rel: f64) -> f64 {
        assert!(k < self.len());
        let mut lo = -1.0;
        while self.count_below(lo) > k {
            lo *= 4.0;
        }
        let mut hi = 1.0;
        while self.count_below(hi) <= k {
            hi *= 4.0;
        }
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= rel * lo.abs().max(hi.abs()) || hi - lo <= f64::MIN_POSITIVE {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `count` smallest eigenvalues in increasing order.
    pub fn lowest(&self, count: usize, rel: f64) -> Vec<f64> {
        (0..count.min(self.len()))
            .map(|k| self.eigenvalue(k, rel))
            .collect()
    }

    /// Eigenvector for the (converged) eigenvalue `lambda` by inverse
    /// iteration, normalised to `xᵀBx = 1`.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let shift = lambda - 1e-10 * lambda.abs().max(1e-300);
        let diag: Vec<f64> = (0..n)
            .map(|i| self.a.diag[i] - shift * self.b.diag[i])
            .collect();
        let off: Vec<f64> = (0..n.saturating_sub(1))
            .map(|i| self.a.off[i] - shift * self.b.off[i])
            .collect();
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64)
            .collect();
        for _ in 0..4 {
            let rhs = self.b.mul_vec(&x);
            x = solve_tridiagonal(&diag, &off, &rhs);
            let norm = self.b.quadratic_form(&x).sqrt();
            if norm > 0.0 && norm.is_finite() {
                x.iter_mut().for_each(|v| *v /= norm);
            }
        }
        // fix the sign so that the largest component is positive
        let imax = (0..n)
            .max_by(|&i, &j| x[i].abs().partial_cmp(&x[j].abs()).unwrap())
            .unwrap_or(0);
        if x[imax] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }
}

/// Solves a symmetric tridiagonal system by Gaussian elimination without
/// pivoting (tiny pivots are nudged, as is customary in inverse iteration).
fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let tiny = |v: f64, scale: f64| {
        if v.abs() < 1e-300_f64.max(1e-16 * scale) {
            1e-16 * scale.max(1e-300)
        } else {
            v
        }
    };
    let mut piv = tiny(diag[0], diag[0].abs());
    if n > 1 {
        c[0] = off[0] / piv;
    }
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = tiny(diag[i] - off[i - 1] * c[i - 1], diag[i].abs());
        if i + 1 < n {
            c[i] = off[i] / piv;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / piv;
    }
    let mut x = d;
    for i in (0..n.saturating_sub(1)).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Dirichlet Laplacian on (0, 1) with P1 elements: the eigenvalues of the
    /// pencil are `(6/h²)(1 - cos θ)/(2 + cos θ)`, `θ = kπh`.
    fn laplacian(n_el: usize) -> Pencil {
        let h = 1.0 / n_el as f64;
        let m = n_el - 1;
        let mut a = SymTridiagonal::zeros(m);
        let mut b = SymTridiagonal::zeros(m);
        for i in 0..m {
            a.diag[i] = 2.0 / h;
            b.diag[i] = 4.0 * h / 6.0;
            if i + 1 < m {
                a.off[i] = -1.0 / h;
                b.off[i] = h / 6.0;
            }
        }
        Pencil::new(a, b).unwrap()
    }

    #[test]
    fn exact_p1_spectrum() {
        let n_el = 50;
        let pencil = laplacian(n_el);
        let h = 1.0 / n_el as f64;
        for (k, lam) in pencil.lowest(4, 1e-14).into_iter().enumerate() {
            let th = (k + 1) as f64 * std::f64::consts::PI * h;
            let exact = 6.0 / (h * h) * (1.0 - th.cos()) / (2.0 + th.cos());
            assert_relative_eq!(lam, exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn inertia_counts_shifted_spectrum() {
        let mut pencil = laplacian(40);
        let shift = 50.0; // π² ≈ 9.87 and 4π² ≈ 39.5 lie below, 9π² above
        for i in 0..pencil.len() {
            pencil.a.diag[i] -= shift * pencil.b.diag[i];
            if i + 1 < pencil.len() {
                pencil.a.off[i] -= shift * pencil.b.off[i];
            }
        }
        assert_eq!(pencil.count_below(0.0), 2);
        let (scaled, _) = pencil.normalized();
        assert_eq!(scaled.count_below(0.0), 2);
    }

    #[test]
    fn eigenvectors_satisfy_the_pencil() {
        let pencil = laplacian(30);
        let lam = pencil.eigenvalue(1, 1e-14);
        let x = pencil.eigenvector(lam);
        let ax = pencil.a.mul_vec(&x);
        let bx = pencil.b.mul_vec(&x);
        let res: f64 = ax
            .iter()
            .zip(&bx)
            .map(|(a, b)| (a - lam * b).abs())
            .fold(0.0, f64::max);
        assert!(res < 1e-8 * lam, "residual {res}");
        assert_relative_eq!(pencil.b.quadratic_form(&x), 1.0, max_relative = 1e-12);
    }
}
