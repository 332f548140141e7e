//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid kernel specification: {0}")]
    InvalidSpec(String),
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("negative lag not allowed (kernels are one-sided in tau)")]
    NegativeLag,
    #[error("mixture must contain at least one component with positive weight")]
    EmptyMixture,
    #[error("quadrature did not converge: {0}")]
    QuadratureDiverged(String),
    #[error("matrix numerically singular in {0}")]
    Singular(&'static str),
    #[error("factorization failed in {0} after jitter escalation")]
    FactorizationFailed(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("real-valued state path requires b = 0; use the complex path")]
    RealPathNeedsZeroOscillation,
    #[error("complex block calibration check failed: {0}")]
    CalibrationMismatch(String),
    #[error("dataset is empty or contains no observed points")]
    EmptyDataset,
    #[error("non-positive innovation variance at step {step}: s = {s}")]
    NonPositiveInnovation { step: usize, s: f64 },
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("dense oracle refuses m = {0} > 5000 points")]
    OracleTooLarge(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("optimization failed: {0}")]
    OptimizationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
