use thiserror::Error;

/// Errors raised by the shift-space toolkit.
///
/// Variants are grouped by [`ErrorKind`] so front ends can map them onto
/// exit codes without matching every case.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("symbol {color}:{digit} is outside the alphabet for p={p}, q={q}")]
    SymbolOutsideAlphabet { color: u32, digit: u32, p: u32, q: u32 },

    #[error("invalid restriction family: {0}")]
    InvalidFamily(String),

    #[error("length {n} is beyond the family horizon {horizon}")]
    BeyondHorizon { n: u64, horizon: u64 },

    #[error("index {n} is beyond the table horizon {horizon}")]
    BeyondTable { n: usize, horizon: usize },

    #[error("position {j} is out of range for length {n}")]
    PositionOutOfRange { j: u64, n: u64 },

    #[error("enumeration of length {n} refused: cap is {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("word is not allowed: {0}")]
    NotAllowed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("gap index N_{k} not found within search bound {bound}")]
    GapIndexNotFound { k: u64, bound: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("search exhausted at step `{step}`: {detail}")]
    SearchExhausted { step: String, detail: String },

    #[error("arithmetic overflow in {0}")]
    Overflow(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),
}

/// Coarse error classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input, bad flags, violated precondition.
    Usage,
    /// A configured resource cap refused the request.
    Resource,
    /// A search or construction did not succeed.
    Failure,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::EnumerationCap { .. } | Error::BeyondTable { .. } => ErrorKind::Resource,
            Error::GapIndexNotFound { .. } | Error::SearchExhausted { .. } | Error::Overflow(_) => {
                ErrorKind::Failure
            }
            _ => ErrorKind::Usage,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
