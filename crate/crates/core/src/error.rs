use thiserror::Error;

/// Errors produced by design construction and geometry queries.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {d} exceeds the explicit enumeration cap of {cap} (2^{d} points)")]
    EnumerationCap { d: usize, cap: usize },

    #[error("dimension mismatch: point has {got} coordinates, design expects {expected}")]
    DimensionMismatch { got: usize, expected: usize },

    #[error("point lies outside [-1,1]^{d}: coordinate {index} is {value}")]
    OutsideCube { d: usize, index: usize, value: f64 },

    #[error("delta must lie in [0,1], got {0}")]
    DeltaOutOfRange(f64),

    #[error("gamma must lie in (0,1), got {0}")]
    GammaOutOfRange(f64),

    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { got: usize, min: usize },

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: u64, min: u64 },

    #[error("direction-number table line {line}: {reason}")]
    DirectionTable { line: usize, reason: String },

    #[error("requested dimension {d} exceeds direction table maximum {max_dim}")]
    DimensionUnsupported { d: usize, max_dim: usize },

    #[error("bisection bracket [{lo}, {hi}] does not straddle the target coverage")]
    BracketInvalid { lo: f64, hi: f64 },

    #[error("design CSV: {0}")]
    DesignCsv(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
