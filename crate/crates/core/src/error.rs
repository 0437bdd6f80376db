use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("assignment length {got} does not match instance size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("weights overflow the 64-bit energy range")]
    Overflow,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn limit(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }
}
