use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum PibError {
    #[error("negative or non-finite probability: {0}")]
    NegativeProbability(f64),

    #[error("distribution sums to {sum} (deviation {deviation:e} exceeds tolerance {tolerance:e})")]
    NotNormalized {
        sum: f64,
        deviation: f64,
        tolerance: f64,
    },

    #[error("empty or undersized alphabet: {0}")]
    EmptyAlphabet(String),

    #[error("joint table would hold {cells} cells, exceeding the cap of {cap}")]
    SizeCapExceeded { cells: u128, cap: usize },

    #[error("conditioning dataset has zero probability under the model")]
    ZeroProbabilityDataset,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("beta must lie in [0, 1) for the bottleneck solver, got {0}")]
    BetaOutOfRange(f64),

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("maximum likelihood undefined: no observations")]
    MleUndefined,

    #[error("objective increased for {0} consecutive steps")]
    Divergence(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, PibError>;
