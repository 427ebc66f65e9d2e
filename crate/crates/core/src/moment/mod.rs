//! Moment relaxations of polynomial minimization over sphere products and
//! the hypercube, and order sweeps against the oracle.

mod build;
mod reduce;
mod solve;
mod sweep;

use thiserror::Error;

pub use build::{
    build_from_spec, build_relaxation, build_relaxation_with, MomentProblem, MomentSpec, SphereEncoding, MAX_CUBE_DIM,
    MAX_MOMENT_SIDE,
};
pub use solve::{solve, RelaxationResult};
pub use sweep::{hierarchy_sweep, theory_bound, Sweep, SweepOptions, SweepRow};

use crate::conic::ConicError;
use crate::kernel::KernelError;
use crate::oracle::OracleError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error("order t = {t} too small for degree {degree} (need 2t >= degree and t >= 1)")]
    OrderTooSmall { degree: usize, t: usize },
    #[error("hypercube of dimension {0} rejected: the full preordering has 2^n products; use n <= {MAX_CUBE_DIM}")]
    CubeTooLarge(usize),
    #[error("moment matrix side {side} exceeds the limit {limit}; lower t")]
    TooLarge { side: usize, limit: usize },
    #[error("{0}")]
    Layout(String),
    #[error("orders must be non-empty and strictly ascending, got {0:?}")]
    InvalidOrders(Vec<usize>),
    #[error(transparent)]
    Conic(#[from] ConicError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
