use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A domain type invariant or configuration constraint was violated.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The inputs are individually valid but the requested quantity is undefined.
    #[error("numerical domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed input at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Config(_) => 2,
            Error::Io(_) | Error::Parse { .. } => 3,
            Error::Domain(_) => 4,
        }
    }
}
