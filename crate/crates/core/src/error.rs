use thiserror::Error;

use crate::relinfo::Strategy;

/// Errors produced by the simulator and the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("distribution is empty")]
    EmptyDistribution,

    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("at least 2 locations are required, got {0}")]
    TooFewLocations(usize),

    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("location {index} is out of range for {n} locations")]
    LocationOutOfRange { index: usize, n: usize },

    #[error("count table is empty")]
    EmptyCounts,

    #[error("agent selection is empty or has no recorded actions")]
    EmptySelection,

    #[error("utility level {requested} exceeds the maximum achievable {max}")]
    InfeasibleUtility { requested: f64, max: f64 },

    #[error("strategy iteration did not converge at beta = {beta} within {iterations} iterations")]
    NonConvergence {
        beta: f64,
        iterations: usize,
        last: Box<Strategy>,
    },

    #[error("calibration needs at least {floor} samples, got {requested}")]
    TooFewSamples { requested: u64, floor: u64 },

    #[error("operation is undefined on a degenerate (all-zero) belief")]
    DegenerateBelief,

    #[error("likelihood column {column} sums to {sum}")]
    LikelihoodNotNormalized { column: usize, sum: f64 },

    #[error("likelihood entry ({action}, {treasure}) = {value} must be strictly positive")]
    LikelihoodNotPositive {
        action: usize,
        treasure: usize,
        value: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
