use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the detection/recognition pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("image too small: {width}x{height}, need at least {min_width}x{min_height}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min_width: usize,
        min_height: usize,
    },

    #[error("degenerate histogram")]
    DegenerateHistogram,

    #[error("alignment line not found")]
    AlignmentLineNotFound,

    #[error("no plate found")]
    NoPlateFound,

    #[error("unreadable plate")]
    UnreadablePlate,

    #[error("degenerate training set")]
    DegenerateTrainingSet,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bounding box out of range: box ({x},{y}) {w}x{h} in {img_w}x{img_h} image")]
    BoxOutOfRange {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        img_w: usize,
        img_h: usize,
    },

    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error("unknown config key: {0}")]
    UnknownConfigKey(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
