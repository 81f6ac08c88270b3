use thiserror::Error;

/// Errors produced by the clustering, evaluation and I/O routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// All features had zero range under range standardisation.
    #[error("no informative features: every feature is constant")]
    NoInformativeFeatures,

    /// Anomalous-pattern extraction retained no cluster of size >= theta.
    #[error("no anomalous clusters retained at theta = {theta}")]
    NoAnomalousClusters { theta: usize },

    #[error("k_target {k} out of range 1..={max}")]
    KTargetOutOfRange { k: usize, max: usize },

    /// The requested partition is finer than the initial anomalous partition.
    #[error(
        "k_target {k} exceeds the {k_star} clusters found by the anomalous-pattern \
         initialisation; lower k_target or use plain ward"
    )]
    KTargetExceedsInit { k: usize, k_star: usize },

    #[error("iteration limit of {0} exceeded without convergence")]
    IterationLimit(usize),

    #[error("non-finite value: {0}")]
    NotFinite(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("every grid cell failed; first error: {0}")]
    GridExhausted(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
