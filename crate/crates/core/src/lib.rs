//! Quantum Fisher information of entangled qubit pairs under Unruh noise.
//!
//! The crate builds the two-qubit input family cosθ|00⟩ + e^{iφ}sinθ|11⟩,
//! pushes it through the Unruh channel of a free scalar or Dirac field at
//! acceleration parameter `r`, and computes the quantum Fisher information
//! (QFI) of the weight parameter θ and the phase parameter φ along two
//! independent routes:
//!
//! * closed-form expressions (including a Gauss hypergeometric form of the
//!   bosonic phase QFI), and
//! * brute-force spectral evaluation on the channel output matrix.
//!
//! Supporting machinery: a small dense complex [`linalg`] layer, general QFI
//! engines in [`qfi`] (symmetric logarithmic derivative, spectral and
//! support-restricted formulas, Bures-distance route), the channel builders
//! in [`unruh`], every analytic expression in [`closed_forms`], and a Monte
//! Carlo Cramér–Rao check in [`estimation`]. The `unruh-qfi` binary exposes
//! point evaluation, verification suites, figure-data sweeps and estimation
//! experiments; see [`cli`].
//!
//! All kernels are generic over the floating-point scalar through
//! [`real::Real`]; `f64` is the working precision used by the CLI and the
//! concrete aliases below.

// Validation sites use `!(x < y)` on purpose: NaN must fail the check.
// Eigensolver internals return (values, vectors) tuples and boxed closure
// fields that trip the type-complexity lint without gaining from aliases.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::type_complexity)]
// Matrix kernels index rows/columns directly; iterator rewrites obscure them.
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod closed_forms;
pub mod error;
pub mod estimation;
pub mod linalg;
pub mod qfi;
pub mod real;
pub mod specfun;
pub mod unruh;

pub use error::{Error, Result};
pub use real::Real;

pub use num_complex::Complex;

/// Working-precision complex number.
pub type C64 = Complex<f64>;
/// Working-precision complex matrix.
pub type Matrix64 = linalg::ComplexMatrix<f64>;
/// Working-precision density operator.
pub type Density64 = linalg::DensityOperator<f64>;
/// Working-precision complex vector.
pub type Vector64 = linalg::CVector<f64>;
/// Single-precision complex matrix (smoke-level use).
pub type Matrix32 = linalg::ComplexMatrix<f32>;
