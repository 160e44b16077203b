use thiserror::Error;

/// Errors surfaced by simulation, fitting and evaluation routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: need at least {required} points, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("model has no fitted state: {0}")]
    NotFitted(String),

    #[error("incomplete grid: missing {0}")]
    MissingCell(String),
}

pub type Result<T> = std::result::Result<T, Error>;
