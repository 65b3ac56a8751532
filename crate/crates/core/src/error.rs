use alloc::string::String;

/// Errors raised when an input violates a structural invariant.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("spectrum leaves [0, 1] by {0:e}")]
    SpectrumOutOfRange(f64),
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
