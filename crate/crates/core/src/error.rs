use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the estimator and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("unsupported scan direction ({0}, {1})")]
    UnsupportedDirection(i32, i32),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("segmentation does not partition 1..={n}: {reason}")]
    InvalidPartition { n: usize, reason: String },

    #[error("non-finite value in {field} at iteration {iteration}")]
    NonFinite { iteration: usize, field: String },

    #[error("evaluation mask selects no pixels")]
    EmptyMask,

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("{path}:{line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid_param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
