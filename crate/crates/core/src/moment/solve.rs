use nalgebra::DMatrix;

use super::{MomentError, MomentProblem};
use crate::conic::{self, ConicBackend, SolverStatus};

/// Outcome of one relaxation solve.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RelaxationResult {
    /// Dual objective when the backend certifies dual feasibility, otherwise
    /// the primal objective (status downgraded to near-optimal). `+inf` for
    /// infeasible relaxations, `-inf` for unbounded ones, NaN on failure.
    pub lower_bound: f64,
    pub primal_objective: f64,
    pub dual_objective: Option<f64>,
    pub status: SolverStatus,
    pub t: usize,
    pub certificate_degree: usize,
    /// Aligned with [`MomentProblem::moment_monomials`].
    pub moments: Vec<f64>,
    /// Dual matrix of the moment-matrix block: the SOS Gram matrix of
    /// `q - lower_bound` modulo the constraints, when available.
    #[serde(skip)]
    pub sos_gram: Option<DMatrix<f64>>,
    pub backend: String,
    pub iterations: usize,
    pub message: String,
}

pub fn solve(problem: &MomentProblem, backend: &dyn ConicBackend) -> Result<RelaxationResult, MomentError> {
    let sol = conic::solve(&problem.conic, backend)?;
    let (lower_bound, status) = match sol.status {
        SolverStatus::Optimal => match sol.dual_objective {
            Some(d) => (d, SolverStatus::Optimal),
            None => (sol.primal_objective, SolverStatus::NearOptimal),
        },
        // the moment side overestimates when feasible; take the more conservative value
        SolverStatus::NearOptimal => {
            let lb = sol.dual_objective.filter(|d| d.is_finite()).map_or(sol.primal_objective, |d| d.min(sol.primal_objective));
            (lb, SolverStatus::NearOptimal)
        }
        SolverStatus::Infeasible => (f64::INFINITY, SolverStatus::Infeasible),
        SolverStatus::Unbounded => (f64::NEG_INFINITY, SolverStatus::Unbounded),
        SolverStatus::NumericalFailure => (f64::NAN, SolverStatus::NumericalFailure),
    };
    Ok(RelaxationResult {
        lower_bound,
        primal_objective: sol.primal_objective,
        dual_objective: sol.dual_objective,
        status,
        t: problem.t,
        certificate_degree: problem.certificate_degree,
        moments: sol.y,
        sos_gram: sol.block_duals.into_iter().next(),
        backend: sol.backend,
        iterations: sol.iterations,
        message: sol.message,
    })
}
