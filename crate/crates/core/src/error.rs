use thiserror::Error;

use crate::quadrature::QuadratureFailure;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected d = {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("spread must have positive real part, got {re} + {im}i")]
    InvalidSpread { re: f64, im: f64 },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("operation requires a nonzero signal")]
    ZeroSignal,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Quadrature(#[from] QuadratureFailure),

    #[error("duplicate phase-space points at indices {0} and {1}")]
    DuplicatePoints(usize, usize),

    #[error("incompatible axis: {0}")]
    IncompatibleAxis(String),

    #[error("bisection bracket failure on [{lo}, {hi}]: {reason}")]
    Bracket { lo: f64, hi: f64, reason: String },

    #[error("eigenvalue solver failed: {0}")]
    Eigen(String),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),
}
