use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("trace is empty")]
    EmptyTrace,

    #[error("value {value} at position {index} is outside [0, 100]")]
    OutOfRange { index: usize, value: f64 },

    #[error("non-uniform spacing: gap {found} at row {row}, expected {expected}")]
    UngriddedData { row: usize, expected: f64, found: f64 },

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("insufficient data: need at least {required} points, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error("unknown synthetic kind '{0}'")]
    InvalidKind(String),

    #[error("empty collection")]
    EmptyCollection,

    #[error("series has zero variance")]
    DegenerateSeries,

    #[error("spacing of {0} minutes does not divide a day")]
    InvalidSpacing(f64),

    #[error("invalid SARIMA order: {0}")]
    InvalidOrder(String),

    #[error("no feasible parameter point found while fitting {0}")]
    FitDiverged(String),

    #[error("every candidate order failed to fit")]
    NoFeasibleModel,

    #[error("shape mismatch: {0}")]
    ShapeError(String),

    #[error("training diverged at epoch {epoch}: loss {loss}")]
    TrainingDiverged { epoch: usize, loss: f64 },

    #[error("channel {channel} has length {found}, expected {expected}")]
    ChannelMismatch { channel: usize, expected: usize, found: usize },

    #[error("metric is undefined: every actual value is zero")]
    UndefinedMetric,

    #[error("actual value at position {0} is zero")]
    ZeroActual(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
