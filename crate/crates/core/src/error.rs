use thiserror::Error;

/// Failure categories shared by every module of the crate.
///
/// The categories map one-to-one onto the command-line exit codes, so keep
/// them coarse: what went wrong is carried in the message.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or incompatible input data.
    #[error("invalid input: {0}")]
    Input(String),
    /// Invalid kernel or solver parameters.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// An iterative routine did not converge.
    #[error("numerical failure: {0}")]
    Numeric(String),
    /// Two independent computations of the same quantity disagree.
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
