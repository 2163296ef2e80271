//! Numerical toolkit for pluriharmonic mappings `f = h + conj(g)` on the unit
//! ball of C^n, where `h` and `g` are polynomial holomorphic mappings.
//!
//! The crate provides:
//!
//! * dense complex matrix calculus (operator norm, minimal gain, determinant,
//!   inverse) in [`cmat`], with the real-matrix counterpart in [`rmat`];
//! * sparse polynomial holomorphic mappings with exact differentiation in
//!   [`poly`];
//! * pluriharmonic Jacobian calculus (dilatation, real Jacobian, block
//!   determinant, stretch extremes) in [`pmap`];
//! * seeded Monte-Carlo ball integration and generalized-volume machinery in
//!   [`volume`];
//! * the closed-form Landau-Bloch constants, radii and growth/dilatation
//!   checks in [`bloch`];
//! * empirical geometric verification (univalence falsification, covering
//!   certification, linear-connectivity estimation, the end-to-end
//!   Landau-Bloch pipeline) in [`verify`];
//! * perturbation families `h + conj(g) A` / `h + g A`, collision witness
//!   transfer and shear verification in [`stability`].
//!
//! All numeric kernels are generic over the real scalar type through the
//! [`Real`] trait (`f32` or `f64`); concrete `f64` aliases live at the crate
//! root. Every stochastic routine takes an explicit 64-bit seed and produces
//! bit-identical results across runs and worker counts.

// index loops mirror the matrix arithmetic they implement
#![allow(clippy::needless_range_loop)]

pub mod bloch;
pub mod cmat;
mod error;
pub mod pmap;
pub mod poly;
pub mod rmat;
pub mod sampling;
mod scalar;
pub mod stability;
pub mod verify;
pub mod volume;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

/// Minimal gain at or below this value is treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

/// Dense complex matrix over `f64`.
pub type CMat64 = cmat::CMat<f64>;
/// Dense real matrix over `f64`.
pub type RMat64 = rmat::RMat<f64>;
/// Sparse polynomial holomorphic mapping over `f64`.
pub type PolyMap64 = poly::PolyMap<f64>;
/// Pluriharmonic mapping over `f64`.
pub type PHMap64 = pmap::PHMap<f64>;
/// Complex scalar over `f64`.
pub type Complex64 = num_complex::Complex<f64>;
