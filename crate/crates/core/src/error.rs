use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("budget {budget} is unreachable: offline cost never exceeds {max}")]
    UnreachableBudget { budget: f64, max: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 1 for domain and precondition failures, 2 for
    /// malformed input and I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInstance(_) | Error::InvalidProfile(_) | Error::Io(_) | Error::Parse(_) => 2,
            _ => 1,
        }
    }
}
