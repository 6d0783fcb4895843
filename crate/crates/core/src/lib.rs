//! Numerical laboratory for the radial theory of `-Δ_p u = |x|^α F(u)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`exponents`] — closed-form critical exponents and regime classification;
//! * [`radial_solver`] — shooting from the centre in (possibly fractional)
//!   dimension `n`, closed-form solutions and residual checks;
//! * [`transform`] — the change of variables `s = r^{1+α/p}` that removes the
//!   weight at the cost of a fractional dimension;
//! * [`stability`] — the second variation, a finite-element Morse-index lower
//!   bound and a Hardy-type certificate of stability outside a ball;
//! * [`estimates`] — numerical audits of the integral, pointwise and scaling
//!   estimates satisfied by stable solutions;
//! * [`verify`] — the reproducible experiment suite driven by the CLI.
//!
//! All computations are deterministic and free of shared mutable state.

// `!(a < b)` comparisons deliberately reject NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimates;
pub mod exponents;
pub mod fd;
pub mod io;
pub mod nonlinearity;
pub mod profile;
pub mod quadrature;
pub mod radial_solver;
pub mod stability;
pub mod testfn;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use exponents::ProblemParams;
pub use nonlinearity::{Nonlinearity, NonlinearityKind, NonlinearitySpec};
pub use profile::RadialProfile;
