use thiserror::Error;

/// Errors raised by the core library.
///
/// `InvalidArgument` marks inputs outside an operation's domain. The other
/// variants mark computations that were well posed but could not finish.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("rejection sampler gave up after {attempts} attempts")]
    RejectionLimit { attempts: u64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True when the error is a domain or parse error rather than a
    /// computational failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidArgument(_) | Error::Parse(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
