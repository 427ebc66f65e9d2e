//! Order-2 quantum Wasserstein distance: states, transport plans, and the
//! real moment relaxation of the complex transport problem.

mod objective;
mod plan;
mod relax;
mod state;

use thiserror::Error;

pub use objective::{kappa_bound, objective_range, on_sphere_pair, real_layout, real_objective, KappaBound, ObjectiveRange, F_MAX, H_MAX};
pub use plan::{transport_cost, Atom, TransportPlan};
pub use relax::{build_w2_relaxation, build_w2_relaxation_with, solve_w2, W2Result};
pub use state::{validate_state, QuantumState, Violation, HERMITIAN_TOL, PROJECTION_TOL, PSD_TOL, TRACE_TOL};

use crate::kernel::KernelError;
use crate::moment::MomentError;
use crate::oracle::OracleError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QwassError {
    #[error("state matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("invalid state: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidState(Vec<Violation>),
    #[error("invalid transport plan: {0}")]
    InvalidPlan(String),
    #[error("states have dimensions {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("order t = {0} too small; the objective has degree 4, use t >= 2")]
    OrderTooSmall(usize),
    #[error("malformed state JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[cfg(test)]
mod tests;
