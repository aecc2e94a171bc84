//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Vector/raster dimensions disagree (band count, pixel count, lengths).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A configuration value violates its documented invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The objective returned a non-finite value; the run cannot continue.
    #[error("objective returned a non-finite value at {point:?}")]
    NonFiniteObjective { point: Vec<f64> },

    /// Training pruned or fused every pole away.
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    /// A metric's precondition failed (coincident centroids, single cluster, ...).
    #[error("degenerate metric: {0}")]
    DegenerateMetric(&'static str),

    /// NMSE/SNR are undefined for an all-zero reference image with nonzero error.
    #[error("zero-signal: NMSE undefined for an all-zero original image")]
    ZeroSignal,

    /// A statistical test's precondition failed.
    #[error("invalid statistics input: {0}")]
    InvalidStatistics(String),
}

pub type Result<T> = std::result::Result<T, Error>;
