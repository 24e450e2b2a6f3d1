use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the fingerprinting pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("audio contains no frames")]
    EmptyAudio,

    #[error("signal too short: {len} samples, need at least {nfft}")]
    SignalTooShort { len: usize, nfft: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("window length {window_len} exceeds band length {band_len}")]
    WindowTooLong { window_len: usize, band_len: usize },

    #[error("empty band")]
    EmptyBand,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("class has no members")]
    EmptyClass,

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
