//! Error type shared by validation, measure evaluation, sampling and the
//! experiment harness.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("entry at index {index} is negative: {value}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("entry at index {index} is not finite: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("entries sum to {sum}, which is more than {tolerance} away from 1")]
    SumOutOfTolerance { sum: f64, tolerance: f64 },

    #[error("a distribution needs at least 2 classes, got {classes}")]
    TooFewClasses { classes: usize },

    #[error("probability {value} is outside [0, 1]")]
    OutOfRange { value: f64 },

    #[error("distributions have different lengths: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid Renyi order alpha = {alpha}: must be positive")]
    InvalidAlpha { alpha: f64 },

    #[error("generic f-divergence needs a strictly positive reference, but P[{index}] = 0")]
    ZeroInReference { index: usize },

    #[error("Bregman divergence needs a generator with a derivative")]
    MissingDerivative,

    #[error("Bregman divergence needs strictly positive entries, found 0 at index {index}")]
    ZeroEntry { index: usize },

    #[error("convex generator `{name}` rejected: {reason}")]
    InvalidGenerator { name: String, reason: String },

    #[error("infeasible sampling constraint: {reason}")]
    InfeasibleConstraint { reason: String },

    #[error("rejection sampling gave up after {attempts} attempts")]
    RejectionBudgetExceeded { attempts: u64 },

    #[error("unknown measure `{name}`")]
    UnknownMeasure { name: String },

    #[error("no records to process")]
    EmptyInput,

    #[error("failed to write experiment output: {0}")]
    WriteFailure(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
