//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {dim} for {what}: must be at least {min}")]
    InvalidDimension { what: &'static str, dim: usize, min: usize },

    #[error("cannot embed operator of dimension {op_dim} at subsystem {index} with dimension {expected}")]
    InvalidEmbedding { op_dim: usize, index: usize, expected: usize },

    #[error("subsystem index {index} out of range for {n_subsystems} subsystems")]
    InvalidSubsystem { index: usize, n_subsystems: usize },

    #[error("dimension mismatch: {left} vs {right} in {what}")]
    DimensionMismatch { what: &'static str, left: usize, right: usize },

    #[error("operator is not hermitian (max deviation {deviation:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("not a valid density matrix: {reason}")]
    InvalidState { reason: String },

    #[error("empty subsystem keep set for partial trace")]
    EmptyKeep,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: {needed} records required, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate truncation: prior interval carries no likelihood mass")]
    DegenerateTruncation,

    #[error("degenerate RPM reference: |P_g - P_f| = {denominator:.3e} below 1e-6")]
    DegenerateReference { denominator: f64 },

    #[error("integration failure: {reason}; retry with a smaller step")]
    IntegrationFailure { reason: String },

    #[error("invalid integration step {step} for shortest segment {shortest}: step must be positive and at most duration/10")]
    InvalidStep { step: f64, shortest: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}
