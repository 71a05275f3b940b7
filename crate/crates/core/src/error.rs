use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants are grouped by category so that front ends can map them to
/// distinct exit codes (see [`Error::category`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("unknown observation index {index} (ground set has {len} items)")]
    UnknownObservation { index: usize, len: usize },

    #[error("{what} has {actual} items, exceeding the limit of {limit}")]
    TooLarge { what: &'static str, actual: usize, limit: usize },

    #[error("symbol {symbol} is outside the alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: u32 },

    #[error("malformed structure: {0}")]
    Structure(String),

    #[error("contradictory orientation of edge {0}-{1}")]
    Inconsistent(usize, usize),

    #[error("oracle call budget of {budget} exhausted after {calls} queries")]
    BudgetExhausted { budget: usize, calls: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

/// Coarse grouping of [`Error`] variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    Config,
    Io,
    Internal,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) => ErrorCategory::Config,
            Error::Io { .. } => ErrorCategory::Io,
            Error::Internal(_) => ErrorCategory::Internal,
            _ => ErrorCategory::Input,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
