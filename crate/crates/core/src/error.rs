use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("beta must be strictly greater than 1 (got {0})")]
    NotGreaterThanOne(String),

    #[error("floor undecidable: enclosure [{lo}, {hi}] straddles an integer at {precision_bits} bits")]
    FloorUndecidable {
        lo: String,
        hi: String,
        precision_bits: u32,
    },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("series tail diverges: ratio is not certifiably below 1")]
    DivergentTail,

    #[error("no deletable loop: {0}")]
    NoDeletableLoop(String),

    #[error("tail of the spectrum beyond its truncation is unavailable")]
    TailUnavailable,

    #[error("spectrum has no growth model that can be certified")]
    NoGrowthModel,

    #[error("root of F(x) = 1 could not be bracketed: {0}")]
    RootNotBracketed(String),

    #[error("no loop through the root within the truncation")]
    EmptyLoopSet,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("graph too large to realize explicitly: {vertices} vertices (limit {limit})")]
    GraphTooLarge { vertices: String, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
