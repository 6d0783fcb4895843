//! Dormand–Prince 5(4) embedded Runge–Kutta pair with local error control.

/// Right-hand side of a two-component system. Returns `None` when the state
/// is outside the domain of the equation.
pub trait Rhs {
    fn eval(&self, x: f64, y: &[f64; 2]) -> Option<[f64; 2]>;
}

impl<F: Fn(f64, &[f64; 2]) -> Option<[f64; 2]>> Rhs for F {
    fn eval(&self, x: f64, y: &[f64; 2]) -> Option<[f64; 2]> {
        self(x, y)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Outcome of one attempted step.
#[derive(Debug, Clone, Copy)]
pub enum Attempt {
    /// Step accepted: new state, derivative at the new state (FSAL) and the
    /// suggested next step size.
    Accepted {
        y: [f64; 2],
        dy: [f64; 2],
        next_h: f64,
    },
    /// Error too large; retry with the suggested step size.
    Rejected { next_h: f64 },
    /// A stage left the domain of the right-hand side.
    OutOfDomain,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

fn axpy(y: &[f64; 2], h: f64, terms: &[(f64, &[f64; 2])]) -> [f64; 2] {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Attempts one step of size `h` from `(x, y)` with derivative `k1 = f(x, y)`.
pub fn attempt<R: Rhs>(
    rhs: &R,
    x: f64,
    y: &[f64; 2],
    k1: &[f64; 2],
    h: f64,
    tol: Tolerances,
) -> Attempt {
    macro_rules! stage {
        ($xs:expr, $ys:expr) => {
            match rhs.eval($xs, &$ys) {
                Some(k) if k[0].is_finite() && k[1].is_finite() => k,
                _ => return Attempt::OutOfDomain,
            }
        };
    }
    let k2 = stage!(x + C2 * h, axpy(y, h, &[(A21, k1)]));
    let k3 = stage!(x + C3 * h, axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = stage!(x + C4 * h, axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = stage!(
        x + C5 * h,
        axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)])
    );
    let k6 = stage!(
        x + h,
        axpy(
            y,
            h,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]
        )
    );
    let y_new = axpy(
        y,
        h,
        &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
    );
    let k7 = stage!(x + h, y_new);

    let mut err = 0.0f64;
    for i in 0..2 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
        err = err.max(e.abs() / sc);
    }
    if !err.is_finite() {
        return Attempt::OutOfDomain;
    }
    let factor = if err == 0.0 {
        MAX_FACTOR
    } else {
        (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
    };
    if err <= 1.0 {
        Attempt::Accepted {
            y: y_new,
            dy: k7,
            next_h: h * factor,
        }
    } else {
        Attempt::Rejected {
            next_h: h * factor.min(1.0),
        }
    }
}
