//! Scalar abstraction over the working floating-point type.
//!
//! Every numeric kernel in this crate is generic over [`Real`], so the same
//! code runs at `f32` and `f64`. The associated tolerance constants certify
//! state validity (Hermitian symmetry, trace, positivity, ...) and scale with
//! the precision of the scalar; the `f64` values are the reference contract,
//! the `f32` values are relaxed analogues for smoke-level use.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

/// Floating-point scalar usable by the numeric kernels.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Relative tolerance for Hermitian symmetry checks.
    const HERM_TOL: Self;
    /// Absolute tolerance on |Tr ρ − 1| when certifying a density operator.
    const TRACE_TOL: Self;
    /// Eigenvalues in [−PSD_TOL, 0) count as rounding dust and are clamped.
    const PSD_TOL: Self;
    /// Budget for eigendecomposition residuals and orthonormality defects.
    const EIG_TOL: Self;
    /// Default support cutoff on eigenvalue sums in spectral formulas.
    const SUPPORT_EPS: Self;
    /// Default truncation tail mass for the bosonic channel.
    const TAIL_TOL: Self;
    /// Default termination tolerance for power series.
    const SERIES_TOL: Self;

    /// Shorthand for converting an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }
}

macro_rules! impl_real {
    ($t:ty, $herm:expr, $trace:expr, $psd:expr, $eig:expr, $supp:expr, $tail:expr, $series:expr) => {
        impl Real for $t {
            const HERM_TOL: Self = $herm;
            const TRACE_TOL: Self = $trace;
            const PSD_TOL: Self = $psd;
            const EIG_TOL: Self = $eig;
            const SUPPORT_EPS: Self = $supp;
            const TAIL_TOL: Self = $tail;
            const SERIES_TOL: Self = $series;
        }
    };
}

impl_real!(f64, 1e-12, 1e-10, 1e-10, 1e-10, 1e-12, 1e-12, 1e-14);
impl_real!(f32, 1e-5, 1e-4, 1e-4, 1e-4, 1e-6, 1e-6, 1e-6);
