//! Perturbed Christoffel–Darboux kernels on spheres: eigenvalue synthesis,
//! the induced diagonal operator on sphere products, and rate constants.

mod constants;
mod lambda;
mod operator;
mod presets;

use thiserror::Error;

pub use constants::{
    bernoulli_chain_bound, c_bisphere, c_bisphere_exact, c_multisphere, c_multisphere_exact, gamma_bound,
    gamma_squared_bound_exact,
};
pub use lambda::{deficit_bound, lambda_problem, synthesize_lambda, LambdaVector};
pub use operator::{apply_operator, bernoulli_chain_sum, cd_kernel_eval, p3_report, P3Report};
pub use presets::{
    general_rate, rate_constant, summarize, BallPreset, Factor, HypercubePreset, PresetKind, PresetRegistry,
    PresetSummary, RateQuery, RateValue, SetPreset, SimplexPreset, SpherePreset,
};

use crate::conic::ConicError;
use crate::harmonic::HarmonicError;
use crate::oracle::OracleError;
use crate::ortho::OrthoError;
use crate::poly::PolyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
    #[error(transparent)]
    Conic(#[from] ConicError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("order too small: no eigenvalue sequence for n = {n}, d = {d} at t = {t}")]
    OrderTooSmall { n: usize, d: usize, t: usize },
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("point is not on the unit sphere (norm {0})")]
    OffSphere(f64),
    #[error("zero eigenvalue at harmonic degree {0:?}; operator is not invertible")]
    ZeroEigenvalue(Vec<usize>),
    #[error("t = {t} is below the threshold {threshold:.6}")]
    BelowThreshold { t: usize, threshold: f64 },
    #[error("no harmonic-constant bound for the {0:?} preset; supply gamma explicitly")]
    GammaRequired(PresetKind),
    #[error("preset not operational: {0}")]
    NotOperational(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("arithmetic overflow computing the {0}")]
    Overflow(String),
    #[error("malformed eigenvalue JSON: {0}")]
    Json(String),
}
