//! Second variation, Morse-index lower bounds and stability certificates.
//!
//! For radial perturbations the second variation of the energy at a radial
//! profile reduces to
//! `Q(φ) = ∫ r^{n-1} [(p-1)|u_r|^{p-2} φ_r² - r^α F'(u) φ²] dr`.
//! Negative directions of `Q` on a truncated interval are counted with a
//! P1 finite-element discretisation; every negative discrete eigenvalue is
//! realised by a compactly supported test function, so the count is a lower
//! bound for the Morse index.

mod eigen;
mod hardy;

pub use eigen::{Pencil, SymTridiagonal};
pub use hardy::{hardy_stability_check, smallest_hardy_radius, HardyCertificate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::profile::{log_grid, RadialProfile};
use crate::quadrature::GaussLegendre;
use crate::testfn::{integrate_against, PiecewiseLinear, TestFunction};

/// Floor applied to `|u_r|` inside `|u_r|^{p-2}`.
pub const SLOPE_FLOOR: f64 = 1e-14;
/// Eigenvalues below `-SPECTRAL_REL_TOL · min_i(A_ii/B_ii)` count as negative.
pub const SPECTRAL_REL_TOL: f64 = 1e-9;
/// Number of eigenvalues reported by default.
pub const DEFAULT_EIGENVALUES: usize = 6;

fn gradient_weight(p: f64, ur: f64) -> f64 {
    ur.abs().max(SLOPE_FLOOR).powf(p - 2.0)
}

/// `Q(φ)` by quadrature on the profile.
pub fn second_variation<T: TestFunction + ?Sized>(
    profile: &RadialProfile,
    nl: &Nonlinearity,
    phi: &T,
) -> Result<f64> {
    let params = *profile.params();
    let (p, alpha, n) = (params.p, params.alpha, params.n);
    integrate_against(profile, phi, |s, v, dv| {
        let rn = s.r.powf(n - 1.0);
        rn * ((p - 1.0) * gradient_weight(p, s.ur) * dv * dv
            - s.r.powf(alpha) * nl.derivative(s.u) * v * v)
    })
}

/// `∫ r^{n-1} φ² dr`, the mass form matching [`second_variation`].
pub fn mass_form<T: TestFunction + ?Sized>(profile: &RadialProfile, phi: &T) -> Result<f64> {
    let n = profile.params().n;
    integrate_against(profile, phi, |s, v, _| s.r.powf(n - 1.0) * v * v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub interval: [f64; 2],
    /// Number of finite elements.
    pub grid_size: usize,
    /// Lowest eigenvalues in increasing order.
    pub eigenvalues: Vec<f64>,
    pub negative_count: usize,
    /// Smallest discrete Rayleigh quotient (the lowest eigenvalue).
    pub min_rayleigh: f64,
    /// Floor applied to `|u_r|` in `|u_r|^{p-2}`.
    pub regularization: f64,
    /// Quadrature points where the floor was active.
    pub floored_points: usize,
    pub spectral_tol: f64,
}

/// Result of a discretisation, with eigenvectors for further checks.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Vec<f64>,
    pub pencil: Pencil,
    pub floored_points: usize,
}

impl Discretization {
    /// The P1 function with interior nodal values `x` and zero boundary values.
    pub fn interpolant(&self, x: &[f64]) -> PiecewiseLinear {
        let mut values = Vec::with_capacity(self.mesh.len());
        values.push(0.0);
        values.extend_from_slice(x);
        values.push(0.0);
        PiecewiseLinear::new(self.mesh.clone(), values).expect("mesh is increasing")
    }

    /// `1e-9 · min_i(A_ii / B_ii)` — the smallest stiffness-to-mass ratio sets
    /// the scale below which eigenvalues are indistinguishable from zero.
    pub fn spectral_tol(&self) -> f64 {
        let scale = self
            .pencil
            .a
            .diag
            .iter()
            .zip(&self.pencil.b.diag)
            .map(|(a, b)| (a / b).abs())
            .fold(f64::INFINITY, f64::min);
        SPECTRAL_REL_TOL * scale
    }
}

/// Assembles the P1 stiffness-minus-potential and mass matrices on `mesh`
/// with homogeneous Dirichlet conditions at both ends.
pub fn assemble(
    profile: &RadialProfile,
    nl: &Nonlinearity,
    mesh: &[f64],
) -> Result<Discretization> {
    if mesh.len() < 3 || mesh.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(
            "mesh needs at least three increasing nodes".into(),
        ));
    }
    let (lo, hi) = (mesh[0], mesh[mesh.len() - 1]);
    if lo < profile.r_min() || hi > profile.r_max() {
        return Err(Error::Support {
            lo,
            hi,
            r_min: profile.r_min(),
            r_max: profile.r_max(),
        });
    }
    let params = *profile.params();
    let (p, alpha, n) = (params.p, params.alpha, params.n);
    let m = mesh.len() - 2;
    let mut a = SymTridiagonal::zeros(m);
    let mut b = SymTridiagonal::zeros(m);
    let rule = GaussLegendre::new(3);
    let mut floored = 0usize;
    let mut total_points = 0usize;
    for e in 0..mesh.len() - 1 {
        let (x0, x1) = (mesh[e], mesh[e + 1]);
        let h = x1 - x0;
        let (mut kk, mut m00, mut m01, mut m11, mut v00, mut v01, mut v11) =
            (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for (x, w) in rule.mapped(x0, x1) {
            let s = profile.sample(x)?;
            total_points += 1;
            if s.ur.abs() < SLOPE_FLOOR {
                floored += 1;
            }
            let rn = x.powf(n - 1.0);
            let stiff = (p - 1.0) * rn * gradient_weight(p, s.ur);
            let pot = rn * x.powf(alpha) * nl.derivative(s.u);
            if !(stiff.is_finite() && pot.is_finite()) {
                return Err(Error::SingularAssembly(format!(
                    "non-finite coefficient at r = {x:e} (u = {}, u_r = {})",
                    s.u, s.ur
                )));
            }
            let l0 = (x1 - x) / h;
            let l1 = (x - x0) / h;
            kk += w * stiff / (h * h);
            m00 += w * rn * l0 * l0;
            m01 += w * rn * l0 * l1;
            m11 += w * rn * l1 * l1;
            v00 += w * pot * l0 * l0;
            v01 += w * pot * l0 * l1;
            v11 += w * pot * l1 * l1;
        }
        // local node e ↔ unknown e-1, node e+1 ↔ unknown e
        let left = e.checked_sub(1);
        let right = if e < m { Some(e) } else { None };
        if let Some(i) = left {
            a.diag[i] += kk - v00;
            b.diag[i] += m00;
        }
        if let Some(j) = right {
            a.diag[j] += kk - v11;
            b.diag[j] += m11;
        }
        if let (Some(i), Some(_)) = (left, right) {
            a.off[i] += -kk - v01;
            b.off[i] += m01;
        }
    }
    if p != 2.0 && floored == total_points {
        return Err(Error::SingularAssembly(format!(
            "|u_r| is below the floor {SLOPE_FLOOR:e} at every quadrature point"
        )));
    }
    Ok(Discretization {
        mesh: mesh.to_vec(),
        pencil: Pencil::new(a, b)?,
        floored_points: floored,
    })
}

/// Spectral report for the discretisation on an explicit mesh.
pub fn morse_index_on_mesh(
    profile: &RadialProfile,
    nl: &Nonlinearity,
    mesh: &[f64],
    eigen_count: usize,
) -> Result<(SpectralReport, Discretization)> {
    let disc = assemble(profile, nl, mesh)?;
    let (scaled, _) = disc.pencil.normalized();
    let tol = disc.spectral_tol();
    let eigenvalues = scaled.lowest(eigen_count.max(1), 1e-13);
    let negative_count = scaled.count_below(-tol);
    let report = SpectralReport {
        interval: [mesh[0], mesh[mesh.len() - 1]],
        grid_size: mesh.len() - 1,
        min_rayleigh: eigenvalues[0],
        eigenvalues,
        negative_count,
        regularization: SLOPE_FLOOR,
        floored_points: disc.floored_points,
        spectral_tol: tol,
    };
    Ok((report, disc))
}

/// Morse-index lower bound on `[r_a, r_b]` with `grid_size` elements equally
/// spaced in `ln r`.
pub fn morse_index_estimate(
    profile: &RadialProfile,
    nl: &Nonlinearity,
    interval: (f64, f64),
    grid_size: usize,
) -> Result<SpectralReport> {
    let (ra, rb) = interval;
    if grid_size < 16 {
        return Err(Error::Config(format!(
            "grid_size must be at least 16, got {grid_size}"
        )));
    }
    if !(ra > 0.0 && rb > ra) {
        return Err(Error::Config(format!("invalid interval [{ra}, {rb}]")));
    }
    let mesh = log_grid(ra, rb, grid_size + 1);
    Ok(morse_index_on_mesh(profile, nl, &mesh, DEFAULT_EIGENVALUES)?.0)
}

/// Both sides of the radial stability inequality in transformed variables:
/// `(N-1) ∫ t^{N-3}|ω_s|^p η² ≤ (p-1) ∫ t^{N-1}|ω_s|^p η_t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Evaluates both sides for a profile of an unweighted problem (`α = 0`,
/// typically the image of the change of variables).
pub fn radial_stability_inequality_audit<T: TestFunction + ?Sized>(
    profile: &RadialProfile,
    eta: &T,
) -> Result<StabilityInequality> {
    let params = *profile.params();
    if params.alpha != 0.0 {
        return Err(Error::Config(
            "the radial stability inequality is stated for transformed (alpha = 0) profiles".into(),
        ));
    }
    let (p, big_n) = (params.p, params.n);
    let lhs = (big_n - 1.0)
        * integrate_against(profile, eta, |s, v, _| {
            s.r.powf(big_n - 3.0) * s.ur.abs().powf(p) * v * v
        })?;
    let rhs = (p - 1.0)
        * integrate_against(profile, eta, |s, _, dv| {
            s.r.powf(big_n - 1.0) * s.ur.abs().powf(p) * dv * dv
        })?;
    Ok(StabilityInequality {
        lhs,
        rhs,
        satisfied: lhs <= rhs,
    })
}
