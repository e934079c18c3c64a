use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input failed format checks (bad alphabet, empty input, bad shape).
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    /// Input is well-formed but outside the domain of the computation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("service unavailable: {0}")]
    ServiceUnavailable(String),

    /// Remote answered with something we could not read. The raw payload is kept.
    #[error("could not parse remote response: {message}")]
    Parse { message: String, raw: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
