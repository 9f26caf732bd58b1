use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the geometric and estimation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("box clamped to the image is empty")]
    DegenerateRegion,
    #[error("innovation covariance is not invertible")]
    NumericalFailure,
    #[error("need at least {needed} correspondences, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("degenerate point configuration")]
    DegenerateConfiguration,
    #[error("point maps to infinity")]
    PointAtInfinity,
    #[error("collinear minimal sample")]
    DegenerateSample,
    #[error("invalid value: {0}")]
    InvalidValue(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("ground truth contains no boxes")]
    EmptyGroundTruth,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandmarkError {
    #[error("frame {0} has tracks but no mask")]
    MissingMask(u32),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoopError {
    #[error("no ground-truth entry for query frame {0}")]
    MissingGroundTruth(u32),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulator config: {0}")]
    ConfigInvalid(String),
    #[error("simulator config has no loop trajectory")]
    NoLoopConfigured,
}

/// Errors from reading and writing on-disk artifacts.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}:{line}: {msg}")]
    InvariantViolation { path: String, line: usize, msg: String },
    #[error("{path}: {msg}")]
    Format { path: String, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("brightness schedule has no label for frame {0}")]
    MissingLabel(u32),
}
