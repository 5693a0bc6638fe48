//! Error type shared across the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Underlying filesystem failure, tagged with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed content in an input file.
    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Input uses a feature the reader deliberately does not handle.
    #[error("unsupported feature in {path}: {message}")]
    Unsupported { path: PathBuf, message: String },

    /// Arguments violate a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// A sweep profile has no local maxima bracketing the zero cell, so no
    /// region of interest can be derived from it.
    #[error("no region of interest: {0}")]
    NoRoi(String),

    /// The initial registration pose falls outside the region of interest.
    #[error("pre-alignment required: {0}")]
    PreAlignmentRequired(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn unsupported(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Unsupported {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }
}
