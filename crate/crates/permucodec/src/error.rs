use thiserror::Error;

/// Errors shared by all codecs in this crate.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("symbol not in alphabet")]
    SymbolNotFound,

    #[error("index {index} out of range for precision {precision}")]
    IndexOutOfRange { index: u64, precision: u64 },

    #[error("record length {len} exceeds maximum {max}")]
    RecordTooLong { len: usize, max: usize },

    #[error("malformed state")]
    MalformedState,

    #[error("state depleted below precision {precision}")]
    StateDepleted { precision: u64 },

    #[error("corrupt message: {0}")]
    Corrupt(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
