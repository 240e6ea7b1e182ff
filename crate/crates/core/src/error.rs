//! Error type shared by the game, dynamics, and simulation modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Cooperation cannot pay when the delivery benefit does not exceed the
    /// forwarding cost; every operation that relies on the constrained dove
    /// optimum rejects this regime.
    #[error("non-viable regime (lambda <= 1): lambda = {lambda}")]
    NonViableRegime { lambda: f64 },

    #[error("population share out of range [0, 1]: {0}")]
    ShareOutOfRange(f64),

    #[error("probability out of range [0, 1]: {name} = {value}")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("length mismatch: {utilities} utilities vs {shares} shares")]
    LengthMismatch { utilities: usize, shares: usize },

    #[error("shares must be non-negative and sum to 1 within 1e-9 (sum = {0})")]
    NotNormalized(f64),

    #[error("invalid integration step: dt = {dt}, horizon = {horizon}")]
    InvalidStep { dt: f64, horizon: f64 },

    #[error("grid too small: need at least {min} steps, got {got}")]
    GridTooSmall { min: u32, got: u32 },

    #[error("empty grid: {0}")]
    EmptyGrid(&'static str),

    #[error("grid value out of range: {name} = {value}")]
    GridValueOutOfRange { name: &'static str, value: f64 },

    /// Unreachable while the search grid contains (1, 1), which always
    /// satisfies the drift constraint; kept so the oracle reports honestly
    /// instead of returning an arbitrary point.
    #[error("no feasible grid point for the constrained dove optimum")]
    Infeasible,

    #[error("invalid topology config: {0}")]
    InvalidTopology(String),

    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
