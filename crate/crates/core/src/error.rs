//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by simulation, maximization, and testing routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid construction with zero paths or zero time steps.
    #[error("grid requires m >= 1 paths and n >= 1 steps (got m={m}, n={n})")]
    EmptyGrid { m: usize, n: usize },

    /// Raw values passed to a grid constructor have the wrong shape.
    #[error("grid values have wrong shape: expected {expected} entries, got {got}")]
    GridShape { expected: usize, got: usize },

    /// Paths must start at zero.
    #[error("path {path} does not start at 0 (got {value})")]
    NonzeroStart { path: usize, value: f64 },

    /// Exhaustive enumeration refused: too many monotone tuples.
    #[error("brute force instance too large: {tuples} monotone tuples exceed the {limit} guard")]
    EnumerationGuard { tuples: u128, limit: u128 },

    /// A partition tuple is non-monotone, out of range, or has the wrong length.
    #[error("invalid partition tuple: {0}")]
    InvalidTheta(String),

    /// A density was evaluated at a boundary or non-increasing point.
    #[error("density evaluated outside its domain: {0}")]
    DensityDomain(String),

    /// A distribution parameter violates its constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A statistical test was handed an empty sample.
    #[error("empty sample passed to {0}")]
    EmptySample(&'static str),

    /// Sample too small for the requested test.
    #[error("{test} requires at least {min} samples (got {got})")]
    SampleTooSmall {
        test: &'static str,
        min: usize,
        got: usize,
    },

    /// Chi-square bins must all carry enough expected mass.
    #[error("chi-square bin {bin} has expected count {expected} < 5")]
    SparseBin { bin: usize, expected: f64 },

    /// Chi-square observed and expected totals disagree.
    #[error("chi-square totals disagree: counts sum to {counts}, expected sums to {expected}")]
    CountMismatch { counts: u64, expected: f64 },

    /// Two campaigns must share a configuration to be compared.
    #[error("campaign configs differ: {0}")]
    ConfigMismatch(String),

    /// A campaign configuration violates its invariants.
    #[error("invalid campaign config: {0}")]
    InvalidConfig(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
