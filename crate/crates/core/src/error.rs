use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the CLI to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },

    #[error("frame {frame}: missing required landmark \"{landmark}\"")]
    MissingLandmark { landmark: String, frame: usize },

    #[error("frame {frame}: landmark \"{landmark}\" has a non-finite coordinate")]
    NonFinite { landmark: String, frame: usize },

    #[error("timestamps not strictly increasing between frames {prev} (t={prev_t}) and {next} (t={next_t})")]
    Ordering {
        prev: usize,
        next: usize,
        prev_t: f64,
        next_t: f64,
    },

    #[error("need at least {needed} frames, got {got}")]
    InsufficientFrames { needed: usize, got: usize },

    #[error("invalid Savitzky-Golay parameters: {0}")]
    InvalidSavGol(String),

    #[error("series of length {len} is shorter than the filter window {window}")]
    SeriesTooShort { len: usize, window: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("value {value} at index {index} is outside [{lo}, {hi}]")]
    OutOfRange {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid body model: {0}")]
    Model(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty valid range: clip has {frames} frames but the filter window needs {window}")]
    EmptyValidRange { frames: usize, window: usize },

    #[error("no plots: {0}")]
    NoPlots(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::SeriesTooShort { .. }
            | Error::OutOfRange { .. }
            | Error::EmptyValidRange { .. }
            | Error::NoPlots(_) => ErrorKind::Numerical,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_owned(),
            reason: reason.into(),
        }
    }
}
