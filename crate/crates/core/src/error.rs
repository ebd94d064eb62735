use thiserror::Error;

/// Errors produced by the estimators, generators and harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("length mismatch: xs has {xs} values, ys has {ys}")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("zero variance")]
    ZeroVariance,
    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),
    #[error("marginal density is zero at the query point")]
    ZeroMarginalDensity,
    #[error("degenerate contingency table")]
    DegenerateTable,
    #[error("aLDG curve is constant on the threshold grid")]
    DegenerateCurve,
    #[error("unknown synthetic family `{0}`")]
    UnknownFamily(String),
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidParameter(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
