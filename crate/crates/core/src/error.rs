use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Coefficient moduli must be prime.
    #[error("arithmetic error: modulus {0} is not prime")]
    NotPrime(u32),

    #[error("presentation error: {0}")]
    Presentation(String),

    #[error("usage error: {0}")]
    Usage(String),

    /// A power series whose constant term is not a unit.
    #[error("series is not invertible: constant term is zero")]
    NotInvertible,

    /// The inverse Todd series of an operation has a non-unit constant term.
    #[error("operation {op} does not have a well-defined Todd genus")]
    NotWellDefined { op: String },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("json error: {0}")]
    Json(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn presentation(msg: impl Into<String>) -> Self {
        Error::Presentation(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
