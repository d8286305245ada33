use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("insufficient samples: {what} needs n >= {required}, got {got}")]
    InsufficientSamples {
        what: &'static str,
        required: usize,
        got: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("enumeration budget exceeded: {tuples} tuples > cap {cap}")]
    Budget { tuples: u128, cap: u128 },
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by invalid user configuration.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}

pub(crate) fn require_samples(what: &'static str, n: usize, required: usize) -> Result<()> {
    if n < required {
        Err(Error::InsufficientSamples { what, required, got: n })
    } else {
        Ok(())
    }
}

pub(crate) fn require_same_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}
