//! Finite-difference weights on arbitrary grids.

/// Weights for the `m`-th derivative at `x0` from values at `xs`
/// (Fornberg's recursion). Returns one weight per node.
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    assert!(n > m, "stencil too small for derivative order");
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// First derivative of samples `y(x)` at every node, using a `width`-point
/// stencil (centred in the interior, one-sided near the ends). With
/// `width = 7` the scheme is sixth-order on smooth grids.
pub fn derivative(x: &[f64], y: &[f64], width: usize) -> Vec<f64> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    let width = width.min(n);
    assert!(width >= 2, "need at least two samples");
    let half = width / 2;
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(half).min(n - width);
            let xs = &x[start..start + width];
            let w = fornberg_weights(x[i], xs, 1);
            w.iter()
                .zip(&y[start..start + width])
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn classic_central_weights() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 1);
        assert_relative_eq!(w[0], -0.5);
        assert_relative_eq!(w[1], 0.0);
        assert_relative_eq!(w[2], 0.5);
        let w2 = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_relative_eq!(w2[0], 1.0);
        assert_relative_eq!(w2[1], -2.0);
    }

    #[test]
    fn seven_point_stencil_is_exact_for_sextics() {
        let x: Vec<f64> = (0..15)
            .map(|i| 0.3 * i as f64 + 0.01 * (i * i) as f64)
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|t| t.powi(6) - 2.0 * t.powi(3) + 1.0)
            .collect();
        let d = derivative(&x, &y, 7);
        for (xi, di) in x.iter().zip(&d) {
            let exact = 6.0 * xi.powi(5) - 6.0 * xi.powi(2);
            assert!((di - exact).abs() <= 1e-8 * exact.abs().max(1.0));
        }
    }
}
