//! Error type shared by all modules.

use thiserror::Error;

/// Failure modes of the numeric kernels and builders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: symmetry defect {defect:.3e} exceeds {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e} below -{tol:.3e}")]
    NotPositive { eigenvalue: f64, tol: f64 },

    #[error("trace deviates from one by {defect:.3e} (tolerance {tol:.3e})")]
    TraceNotOne { defect: f64, tol: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("series did not converge within {terms} terms (last term {last:.3e})")]
    SeriesDiverged { terms: usize, last: f64 },

    #[error("vector is not normalized: |norm - 1| = {defect:.3e}")]
    NotNormalized { defect: f64 },

    #[error("vectors are not orthonormal: max Gram defect {defect:.3e}")]
    NotOrthonormal { defect: f64 },

    #[error(
        "derivative moves the state off its support (kernel-block magnitude {defect:.3e}); \
         the symmetric logarithmic derivative does not exist there"
    )]
    SupportMoved { defect: f64 },

    #[error(
        "truncation too short: tail mass {tail:.3e} exceeds {tol:.3e}, need n_max >= {required}"
    )]
    TruncationTooShort {
        tail: f64,
        tol: f64,
        required: usize,
    },

    #[error("{0}")]
    Domain(String),

    #[error("estimation target carries no information: {0}")]
    NoInformation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
