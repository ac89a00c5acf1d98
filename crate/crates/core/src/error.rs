//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("integrand returned a non-finite value at x = {at}")]
    NonFinite { at: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("initial state has zero posterior density")]
    BadInit,

    #[error("t-walk initial pair must differ in every coordinate")]
    IdenticalPair,

    #[error("proposal envelope has non-finite mass over the target support")]
    UnboundedTarget,

    #[error("training chain column {0} has zero variance")]
    DegenerateChain(usize),

    #[error("series is constant; autocorrelation is undefined")]
    ConstantSeries,

    #[error("no self-consistent autocorrelation window W <= N/2 exists")]
    WindowFailure,

    #[error("latent point has zero conditional density")]
    ZeroDensityPoint,

    #[error("uncensored observation {value} is not below the threshold {threshold}")]
    CensoredAboveThreshold { value: f64, threshold: f64 },

    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("litter {0} has no pups")]
    EmptyLitter(usize),

    #[error("hyperparameters (a={a}, b={b}) lie outside the posterior propriety region: {reason}")]
    ImproperPosterior { a: f64, b: f64, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 for usage/config errors, 3 for runtime numerical errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) => 2,
            _ => 3,
        }
    }
}
