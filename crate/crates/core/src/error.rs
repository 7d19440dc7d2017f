use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("curve order {order} exceeds the supported maximum of {max}")]
    OrderTooLarge { order: u32, max: u32 },

    #[error("index {index} is outside the curve ({len} cells)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point ({row}, {col}) is outside the {side}x{side} grid")]
    PointOutOfRange { row: u32, col: u32, side: u32 },

    #[error("invalid character {ch:?} at position {position}")]
    InvalidBase { position: usize, ch: char },

    #[error("k must be between 1 and {max}, got {k}")]
    InvalidK { k: usize, max: usize },

    #[error("sequence of length {len} is shorter than k = {k}")]
    SequenceTooShort { len: usize, k: usize },

    #[error("code {code} is not a valid {k}-mer code")]
    CodeOutOfRange { code: u32, k: usize },

    #[error("k-mer codes do not overlap consistently at position {position}")]
    InconsistentOverlap { position: usize },

    #[error("distance requires two distinct positions, got {0} twice")]
    SamePosition(usize),

    #[error("length {0} is not a power of four")]
    NotPowerOfFour(usize),

    #[error("sequence length must be at least 2, got {0}")]
    LengthTooSmall(usize),

    #[error("inconsistent image layout: {0}")]
    ImageLayout(String),

    #[error("image has no occupied pixels")]
    EmptyImage,

    #[error("image payload has {actual} pixels, expected {expected}")]
    PayloadMismatch { expected: usize, actual: usize },

    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("split needs at least {min} records, got {got}")]
    TooFewRecords { got: usize, min: usize },

    #[error("records have mixed sequence lengths (expected {expected}): {offenders}")]
    MixedLengths { expected: usize, offenders: String },

    #[error("invalid archive: {0}")]
    Archive(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
