use thiserror::Error;

/// Errors raised by the engine. Most operations are total; these cover
/// malformed input and violated preconditions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("mode index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: u32, rank: u32 },

    #[error("{0} is not a creation mode (need n <= -1)")]
    NotCreation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("N=2 closure failed at pair {pair}: {detail}")]
    Closure { pair: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
