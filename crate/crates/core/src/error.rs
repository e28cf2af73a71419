use thiserror::Error;

/// Errors produced by schedule construction, layout, scoring and planning.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported sequence shape: {0}")]
    UnsupportedShape(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("insufficient structure: {0}")]
    InsufficientStructure(String),

    #[error("head dimension {head_dim} exceeds the oracle limit of {limit}")]
    OracleLimit { head_dim: usize, limit: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
