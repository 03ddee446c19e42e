//! Numerical laboratory for Wick powers of Gaussian difference quotients.
//!
//! A mean-zero Gaussian process `G` with stationary increments and
//! increment variance `sigma2` has difference quotients
//! `(G(x+h) - G(x)) / h` whose Wick powers, integrated against a
//! compactly supported test function, converge as `h` shrinks to a
//! chaos built on the generalized derivative of `G`. This crate
//! implements the objects that make that statement quantitative:
//!
//! - [`increment_variance`]: the closed model family, the derived kernel
//!   and its averaged forms, and numeric verification of the regularity
//!   hypotheses;
//! - [`path_sampler`]: exact simulation on a uniform grid by circulant
//!   embedding, with covariance validation;
//! - [`wick`]: Hermite polynomials, Gaussian moments, Wick powers and the
//!   cross-moment collapse;
//! - [`chaos`]: the difference-quotient functionals, their exact second
//!   moments, the chaos metric and its envelopes;
//! - [`orlicz`]: exponential Orlicz functions, inverses, the Young-type
//!   pairing and empirical Luxemburg norms;
//! - [`entropy`]: metric tables, ball measures and the majorizing-measure
//!   entropy integrals.
//!
//! Everything is deterministic given a seed: Monte Carlo layers draw from
//! counter-based substreams ([`rng`]) and aggregate in fixed order.

pub mod chaos;
pub mod entropy;
pub mod error;
pub mod increment_variance;
pub mod orlicz;
pub mod path_sampler;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod wick;

pub use chaos::{
    averaged_kernel_power_integral, chaos_functional, cross_second_moment, envelope_gap,
    envelope_small_h, limit_second_moment, metric_d, metric_d_with_tolerance, ChaosEstimate,
    PiecewiseLinear, StepFunction,
};
pub use entropy::{
    check_majorizing_bound, EntropyIntegral, MajorizingReport, MajorizingRow, MajorizingStatus,
    MetricTable,
};
pub use error::{Error, Result};
pub use increment_variance::{
    check_hypotheses, ConditionId, ConditionRecord, ConditionReport, DeltaExponent,
    IncrementVarianceModel, ModelKind,
};
pub use orlicz::{
    find_gq, lambda_q, orlicz_norm_empirical, phi_q, psi, psi_inv, young_check, Q, YoungReport,
};
pub use path_sampler::{
    increment_autocovariance, sample_path, verify_path_covariance, CovarianceReport,
    EmbeddingReport, GaussianPath, PathSampler, ProbePair, SampleGrid,
};
pub use wick::{
    gaussian_even_moment, hermite_orthonormal, wick_cross_moment, wick_power, WickContext,
};
