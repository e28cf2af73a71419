use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PROPERTY: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Validation(#[from] ropelab::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("property failed: {0}")]
    Property(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Validation(_) | CliError::Config(_) => EXIT_VALIDATION,
            CliError::Property(_) => EXIT_PROPERTY,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}
