use thiserror::Error;

/// Errors raised by the point-set, discrepancy and cubature routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QmcError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("requested {requested} points but the generator supports at most {max}")]
    TooManyPoints { requested: u128, max: u128 },

    #[error("index {0} exceeds the supported range (< 2^52)")]
    IndexOutOfRange(u64),

    #[error("randomization `{randomization}` is not compatible with the `{family}` sequence")]
    IncompatibleRandomization {
        family: &'static str,
        randomization: &'static str,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("point set is not closed under addition modulo 1: {0}")]
    NotALattice(String),

    #[error("argument {value} lies outside the open unit interval")]
    OutsideOpenInterval { value: f64 },

    #[error("integrand returned a non-finite value {value} at point index {index}")]
    NonFinite { index: u64, value: f64 },

    #[error("t-value paths disagree: rank path gives {rank}, counting path gives {count}")]
    TValueMismatch { rank: u32, count: u32 },
}

impl QmcError {
    /// True for failures of the numerics rather than of the request.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            QmcError::NonFinite { .. }
                | QmcError::OutsideOpenInterval { .. }
                | QmcError::TValueMismatch { .. }
        )
    }
}

impl From<std::io::Error> for QmcError {
    fn from(e: std::io::Error) -> Self {
        QmcError::Io(e.to_string())
    }
}

pub type Result<T, E = QmcError> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(QmcError::InvalidParameter(msg.into()))
}
