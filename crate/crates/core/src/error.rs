use thiserror::Error;

/// Errors produced by the lab's numerical kernels and protocol engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix not Hermitian: max |m - m†| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite values produced by {0}")]
    NonFinite(&'static str),

    #[error(
        "no common diagonal basis: the two first-outcome bases disagree by {angle:.3e} rad \
         (tolerance {tolerance:.1e})"
    )]
    BasisDisagreement { angle: f64, tolerance: f64 },

    #[error("angle configuration not invertible: {0}")]
    AngleNotInvertible(String),

    #[error("unsupported for this engine: {0}")]
    Unsupported(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
