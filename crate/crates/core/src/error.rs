use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes or carriers that do not fit together.
    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("dimension guard exceeded for {what}: needs {required} dense entries, limit is {limit}")]
    Guard { what: String, required: u128, limit: u128 },

    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("missing report series `{0}`")]
    MissingSeries(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), message: message.into() }
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Guard { .. } => 3,
            Error::Numerical(_) => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
