//! Quadrature rules on sampled data and on callables.

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the `order`-point rule by Newton iteration on the Legendre
    /// polynomial, starting from the Chebyshev-like initial guesses.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Single-panel Gauss–Legendre rule of the given order.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, order: usize) -> f64 {
    GaussLegendre::new(order).integrate(f, a, b)
}

/// Composite Gauss–Legendre rule on `panels` equal panels.
pub fn gauss_legendre_composite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    order: usize,
    panels: usize,
) -> f64 {
    let rule = GaussLegendre::new(order);
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + h * k as f64;
            rule.integrate(&mut f, lo, lo + h)
        })
        .sum()
}

/// Composite Gauss–Legendre rule on panels that are equal in `ln x`;
/// requires `0 < a <= b`. Suited to integrands with power-law behaviour.
pub fn gauss_legendre_log<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    order: usize,
    panels: usize,
) -> f64 {
    assert!(a > 0.0 && b >= a, "log-panel quadrature needs 0 < a <= b");
    let rule = GaussLegendre::new(order);
    let panels = panels.max(1);
    let ratio = (b / a).powf(1.0 / panels as f64);
    let mut lo = a;
    let mut total = 0.0;
    for k in 0..panels {
        let hi = if k + 1 == panels { b } else { lo * ratio };
        total += rule.integrate(&mut f, lo, hi);
        lo = hi;
    }
    total
}

/// Composite trapezoid rule on (possibly nonuniform) samples.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Composite Simpson rule on nonuniform samples. Consecutive interval pairs
/// use the exact integral of the interpolating parabola; a trailing single
/// interval is integrated with the parabola through the last three nodes.
pub fn simpson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return trapezoid(x, y);
    }
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < n {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let hs = h0 + h1;
        total += hs / 6.0
            * (y[i] * (2.0 - h1 / h0)
                + y[i + 1] * hs * hs / (h0 * h1)
                + y[i + 2] * (2.0 - h0 / h1));
        i += 2;
    }
    if i + 1 < n {
        // last interval [x_{n-2}, x_{n-1}] from the parabola through the last
        // three nodes, written as y1 + b t + c t² with t = x - x_{n-2}
        let (h0, h1) = (x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]);
        let (y0, y1, y2) = (y[n - 3], y[n - 2], y[n - 1]);
        let d0 = (y1 - y0) / h0;
        let d1 = (y2 - y1) / h1;
        let c = (d1 - d0) / (h0 + h1);
        let b = d1 - c * h1;
        total += y1 * h1 + b * h1 * h1 / 2.0 + c * h1 * h1 * h1 / 3.0;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for order in 1..=20 {
            let rule = GaussLegendre::new(order);
            let deg = 2 * order - 1;
            let exact =
                (2f64.powi(deg as i32 + 1) - (-1f64).powi(deg as i32 + 1)) / (deg as f64 + 1.0);
            let got = rule.integrate(|x| x.powi(deg as i32), -1.0, 2.0);
            assert_relative_eq!(got, exact, max_relative = 1e-12);
            let wsum: f64 = rule.weights.iter().sum();
            assert_relative_eq!(wsum, 2.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn composite_rules_integrate_smooth_functions() {
        let exact = 1f64.exp() - 1.0;
        assert_relative_eq!(
            gauss_legendre_composite(f64::exp, 0.0, 1.0, 8, 4),
            exact,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            gauss_legendre(f64::exp, 0.0, 1.0, 12),
            exact,
            max_relative = 1e-14
        );
        let log_exact = 2.0 * (1000f64.sqrt() - 1.0);
        assert_relative_eq!(
            gauss_legendre_log(|x| x.powf(-0.5), 1.0, 1000.0, 8, 20),
            log_exact,
            max_relative = 1e-13
        );
    }

    #[test]
    fn simpson_is_exact_for_quadratics_on_nonuniform_grids() {
        let x: Vec<f64> = (0..12)
            .map(|i| (i as f64 * 0.37).powf(1.3) + 0.1 * i as f64)
            .collect();
        for len in [3usize, 4, 7, 12] {
            let xs = &x[..len];
            let y: Vec<f64> = xs.iter().map(|&t| 1.0 - 2.0 * t + 0.5 * t * t).collect();
            let (a, b) = (xs[0], xs[len - 1]);
            let prim = |t: f64| t - t * t + t * t * t / 6.0;
            assert_relative_eq!(simpson(xs, &y), prim(b) - prim(a), max_relative = 1e-12);
        }
    }

    #[test]
    fn simpson_converges_at_fourth_order() {
        let err = |n: usize| {
            let x: Vec<f64> = (0..=n)
                .map(|i| (i as f64 / n as f64).powi(2) * 3.0)
                .collect();
            let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
            (simpson(&x, &y) - (1.0 - 3f64.cos())).abs()
        };
        let ratio = err(40) / err(80);
        assert!(ratio > 12.0, "ratio {ratio}");
    }

    #[test]
    fn trapezoid_basic() {
        assert_relative_eq!(trapezoid(&[0.0, 1.0, 3.0], &[0.0, 1.0, 3.0]), 4.5);
    }
}
