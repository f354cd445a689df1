use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the sharpness pipeline and the evaluation harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("plane dimensions must be at least 1x1, got {height}x{width}")]
    EmptyPlane { height: usize, width: usize },

    #[error("sample buffer holds {got} values but {height}x{width} needs {expected}")]
    SampleCount {
        height: usize,
        width: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("plane dimensions differ: {0:?} vs {1:?}")]
    ShapeMismatch((usize, usize), (usize, usize)),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("image {height}x{width} too small: {reason}")]
    ImageTooSmall {
        height: usize,
        width: usize,
        reason: String,
    },

    #[error("failed to read image {path}: {source}")]
    ImageRead {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("unsupported pixel format in {path}: {format}")]
    UnsupportedFormat { path: PathBuf, format: String },

    #[error("degenerate statistics: {0}")]
    Degenerate(String),

    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
