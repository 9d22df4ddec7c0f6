//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("mass must be strictly positive, got {0}")]
    NonPositiveMass(f64),

    #[error("fields live on different domains")]
    DomainMismatch,

    #[error("extension height must be nonnegative, got {0}")]
    NegativeHeight(f64),

    #[error("sample point outside the domain: {0}")]
    OutsideDomain(String),

    #[error("growth exponent r = {r} outside the admissible interval (2, {upper})")]
    GrowthExponentOutOfRange { r: f64, upper: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("small-amplitude margin violated: omega + theta_inf = {sum} must be below m = {m}")]
    SmallAmplitudeMargin { sum: f64, m: f64 },

    #[error("mountain-pass geometry failure: {0}")]
    GeometryFailure(String),

    #[error("solver did not converge: {0}")]
    Unconverged(String),

    #[error("field file format error: {0}")]
    FieldFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
