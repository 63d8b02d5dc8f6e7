use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulation, warping and evaluation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's precondition (shape, index, range).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numeric input is outside the domain the operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// The configuration document could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    /// An input file or directory is missing, unreadable, or empty.
    #[error("input error: {0}")]
    Input(String),

    /// A stored artifact does not match its recorded checksum or format.
    #[error("data integrity error in {path}: {reason}")]
    Integrity { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image codec error on {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status: 2 config/argument, 3 input, 4 data integrity.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) | Error::Domain(_) | Error::Config(_) => 2,
            Error::Input(_) | Error::Io { .. } | Error::Image { .. } => 3,
            Error::Integrity { .. } | Error::Json(_) => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn integrity(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Integrity {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
