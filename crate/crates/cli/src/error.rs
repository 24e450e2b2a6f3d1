use std::fmt;
use std::path::{Path, PathBuf};

use spectromap::Error;

/// Pipeline stage a failure is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Args,
    Load,
    Spectrogram,
    Search,
    Serialize,
    Aggregate,
    Render,
    Synth,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Args => "args",
            Stage::Load => "load",
            Stage::Spectrogram => "spectrogram",
            Stage::Search => "search",
            Stage::Serialize => "serialize",
            Stage::Aggregate => "aggregate",
            Stage::Render => "render",
            Stage::Synth => "synth",
        })
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PROCESSING: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub stage: Stage,
    pub path: Option<PathBuf>,
    pub source: Error,
    pub code: i32,
}

impl CliError {
    pub fn new(stage: Stage, path: Option<&Path>, source: Error) -> Self {
        let code = match &source {
            Error::FileNotFound(_)
            | Error::UnsupportedFormat(_)
            | Error::EmptyAudio
            | Error::Parse { .. }
            | Error::Schema(_)
            | Error::InvalidParams(_) => EXIT_INPUT,
            Error::SignalTooShort { .. }
            | Error::WindowTooLong { .. }
            | Error::EmptyBand
            | Error::ShapeMismatch(_)
            | Error::EmptyClass
            | Error::Io(_) => EXIT_PROCESSING,
        };
        CliError {
            stage,
            path: path.map(Path::to_path_buf),
            source,
            code,
        }
    }

    pub fn input(stage: Stage, message: impl Into<String>) -> Self {
        CliError::new(stage, None, Error::InvalidParams(message.into()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.path {
            Some(p) => write!(f, "[{}] {}: {}", self.stage, p.display(), self.source),
            None => write!(f, "[{}] {}", self.stage, self.source),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;
