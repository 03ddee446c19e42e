//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the closed-form, sampling and quadrature layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("power-law exponent condition unsatisfiable: delta = {delta} outside (0, 1) for r = {r}, k = {k}")]
    DeltaOutOfRange { r: f64, k: u32, delta: f64 },

    #[error("empty grid passed to a condition check")]
    EmptyGrid,

    #[error("increment covariance is not positive semidefinite: eigenvalue {min_eigenvalue}")]
    NonPsdCovariance { min_eigenvalue: f64 },

    #[error("insufficient sample: need at least {needed}, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("h = {h} is not an integer multiple of the grid step {delta}")]
    NotGridMultiple { h: f64, delta: f64 },

    #[error("test-function support plus shift h exceeds the sampled range: {0}")]
    SupportOverflow(String),

    #[error("kernel power is not integrable: k(2 - r) = {exponent} >= 1")]
    NonIntegrableKernel { exponent: f64 },

    #[error("Wick order {k} exceeds the supported maximum {max}")]
    OrderTooLarge { k: u32, max: u32 },

    #[error("numerical consistency failure: {0}")]
    NumericalInconsistency(String),

    #[error("value {value} is not a point of the metric-table grid")]
    NotOnGrid { value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
