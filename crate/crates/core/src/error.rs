use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters violate an admissibility inequality.
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    /// Caller passed inconsistent arguments (mismatched lengths and the like).
    #[error("usage error: {0}")]
    Usage(String),

    /// Coincident or otherwise degenerate input where strictness is required.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A numerical routine failed or a consistency check tripped.
    #[error("numerical error in {context}: {detail}")]
    Numerical { context: String, detail: String },

    /// A configured resource budget would be exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Malformed structured text.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn numerical(context: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Numerical {
            context: context.into(),
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
