use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A RIFF/WAVE structure could not be parsed.
    #[error("malformed WAV data at byte {offset}: {reason}")]
    Parse { offset: u64, reason: String },

    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("input too short: {0}")]
    TooShort(String),

    /// A model or dataset refers to a feature the vector does not carry.
    #[error("missing feature `{0}`")]
    MissingFeature(String),

    #[error("dataset: {0}")]
    Dataset(String),

    #[error("model file line {line}: {reason}")]
    ModelFormat { line: usize, reason: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
