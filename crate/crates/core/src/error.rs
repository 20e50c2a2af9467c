use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("segments overlap or are unsorted near x = {at}")]
    OverlappingSegments { at: f64 },

    #[error("tau is not integrable on [{from}, {to})")]
    NonIntegrableTau { from: f64, to: f64 },

    #[error("sigma is not square integrable on [{from}, {to})")]
    SigmaNotLocallyL2 { from: f64, to: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("gauge function is not locally absolutely continuous: {0}")]
    NonDifferentiableTheta(String),

    #[error("x = {x} outside covered range [{lo}, {hi})")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("tolerance not met at x = {x}: {reason}")]
    ToleranceNotMet { x: f64, reason: String },

    #[error("degenerate Weyl disk at x = {x}")]
    DegenerateDisk { x: f64 },

    #[error("spectral parameter must lie in the open upper half-plane")]
    NotUpperHalfPlane,

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("zero vector has no Prüfer representation")]
    ZeroVector,

    #[error("bump positions not sparse: x[{index}] and x[{next}] closer than 2Δ", next = .index + 1)]
    PositionsNotSparse { index: usize },

    #[error("coupling sequence does not decay: {0}")]
    DecayViolated(String),

    #[error("no admissible interval in the requested window")]
    EmptyResult,

    #[error("phase reduction error {estimate:e} rad exceeds limit")]
    PhasePrecisionLoss { estimate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
