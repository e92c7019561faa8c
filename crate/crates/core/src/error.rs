use thiserror::Error;

use crate::env::LatticePoint;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no open vertex within {limit} levels above {from}")]
    SearchExceeded { from: LatticePoint, limit: u32 },

    #[error("{0} is outside the traced range")]
    OutOfRange(String),

    #[error("box holds {vertices} vertices, limit is {limit}")]
    TooLarge { vertices: u64, limit: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { field: field.to_string(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
