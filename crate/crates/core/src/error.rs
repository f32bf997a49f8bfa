use thiserror::Error;

/// Errors produced by the f2lab kernels.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Vector, matrix or tensor dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A parameter is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested enumeration or allocation exceeds a guard.
    #[error("capacity exceeded: {what} needs {needed}, limit is {limit}")]
    Capacity {
        what: String,
        needed: String,
        limit: String,
    },

    /// Operands belong to different fields.
    #[error("field mismatch: GF(2^{0}) vs GF(2^{1})")]
    FieldMismatch(u32, u32),

    /// Malformed on-disk input.
    #[error("parse error: {0}")]
    Parse(String),

    /// An internal identity that must hold did not.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn capacity(
    what: impl Into<String>,
    needed: impl std::fmt::Display,
    limit: impl std::fmt::Display,
) -> Error {
    Error::Capacity {
        what: what.into(),
        needed: needed.to_string(),
        limit: limit.to_string(),
    }
}
