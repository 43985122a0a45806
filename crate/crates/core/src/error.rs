use thiserror::Error;

/// Errors raised while validating inputs to the matrix-profile engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time series must have at least 4 samples, got {0}")]
    SeriesTooShort(usize),

    #[error("non-finite sample {value} at position {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("window length must be at least 4, got {0}")]
    WindowTooShort(usize),

    #[error("window length {m} must be smaller than the series length {n}")]
    WindowTooLong { m: usize, n: usize },

    #[error("exclusion width {exclusion} leaves no computable diagonal (needs 1 <= exclusion < {limit})")]
    InvalidExclusion { exclusion: usize, limit: usize },

    #[error("worker count must be positive")]
    NoWorkers,

    #[error("batch width must be positive")]
    ZeroBatchWidth,

    #[error("window pair ({i}, {j}) out of range for {windows} windows")]
    IndexOutOfRange { i: usize, j: usize, windows: usize },

    #[error("profiles to reduce have mismatched shapes ({expected} vs {found})")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("nothing to reduce")]
    EmptyReduction,

    #[error("oracle limited to {limit} windows, got {windows}")]
    OracleTooLarge { windows: usize, limit: usize },

    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
