//! Exact solver and spectral toolkit for the half-wave maps equation
//! `dU/dt = -(i/2)[U, |D|U]` with rational Grassmannian-valued data.
//!
//! A rational map is stored in simple-pole form
//! `U(x) = U_inf + sum_j A_j/(x - z_j) + A_j^*/(x - conj z_j)` with `Im z_j < 0`
//! and rank-one nilpotent residues. The Lax operator restricted to the
//! finite-dimensional invariant Hardy subspace spanned by `e_j/(x - z_j)`
//! turns the evolution into an eigenvalue problem for `Z + tT`.

pub mod error;
pub mod flow;
pub mod hardy_ops;
pub mod io;
pub mod linalg;
pub mod oracles;
pub mod poly;
pub mod random;
pub mod rational_maps;
pub mod solitons;

pub use error::{HwmError, Result};
pub use num_complex::Complex64 as C64;

pub type CMat = nalgebra::DMatrix<C64>;
pub type CVec = nalgebra::DVector<C64>;

/// Default tolerance for constraint residuals.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Minimum distance between two poles before they are treated as merged.
pub const POLE_COLLISION_TOL: f64 = 1e-8;
