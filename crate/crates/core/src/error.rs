use thiserror::Error;

use crate::datagen::VoronoiMode;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum TdaError {
    #[error("dimension mismatch: {left_name} has dimension {left}, {right_name} has dimension {right}")]
    DimensionMismatch {
        left_name: &'static str,
        left: usize,
        right_name: &'static str,
        right: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("bootstrap replicate {index} failed: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<TdaError>,
    },

    #[error("parameter value {value} failed: {source}")]
    Parameter {
        value: f64,
        #[source]
        source: Box<TdaError>,
    },

    #[error("voronoi {mode} stratum is empty at tolerance {tolerance}; try a larger tolerance")]
    EmptyStratum { mode: VoronoiMode, tolerance: f64 },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = TdaError> = std::result::Result<T, E>;

impl TdaError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        TdaError::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad user input (as opposed to I/O or internal faults).
    pub fn is_validation(&self) -> bool {
        match self {
            TdaError::DimensionMismatch { .. }
            | TdaError::InvalidParameter(_)
            | TdaError::InvalidGrid(_)
            | TdaError::InvalidCloud(_)
            | TdaError::EmptyCloud
            | TdaError::EmptyStratum { .. }
            | TdaError::Format(_) => true,
            TdaError::Replicate { source, .. } | TdaError::Parameter { source, .. } => {
                source.is_validation()
            }
            TdaError::Io(_) | TdaError::Internal(_) => false,
        }
    }
}
