//! Standard-form conic programs and interchangeable solver backends.
//!
//! Backends implement [`ConicBackend`] and are looked up by name in a
//! [`BackendRegistry`]. The environment variable `SPHERE_SOS_BACKEND` picks
//! the default. [`solve`] runs the shared equality presolve and then the
//! selected backend.

mod clarabel_backend;
mod dense_ipm;
mod export;
mod presolve;
mod problem;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

pub use clarabel_backend::ClarabelBackend;
pub use dense_ipm::DenseIpmBackend;
pub use export::{read_problem, write_problem};
pub use presolve::{scan_equalities, EqualityScan};
pub use problem::{ConicProblem, PsdBlock, SymEntry};

pub const BACKEND_ENV: &str = "SPHERE_SOS_BACKEND";
pub const DEFAULT_BACKEND: &str = "dense-ipm";
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConicError {
    #[error("malformed conic problem: {0}")]
    Malformed(String),
    #[error("unknown backend `{0}` (available: {1})")]
    UnknownBackend(String, String),
    #[error("backend failure: {0}")]
    Backend(String),
    #[error("problem file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

impl SolverStatus {
    /// Optimal or near optimal.
    pub fn has_solution(self) -> bool {
        matches!(self, Self::Optimal | Self::NearOptimal)
    }
}

impl fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Optimal => "optimal",
            Self::NearOptimal => "near_optimal",
            Self::Infeasible => "infeasible",
            Self::Unbounded => "unbounded",
            Self::NumericalFailure => "numerical_failure",
        };
        f.write_str(s)
    }
}

/// Primal variables `y`, dual multipliers and both objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicSolution {
    pub status: SolverStatus,
    pub y: Vec<f64>,
    pub primal_objective: f64,
    /// Present when the backend returned usable dual variables.
    pub dual_objective: Option<f64>,
    pub eq_duals: Vec<f64>,
    pub block_duals: Vec<DMatrix<f64>>,
    pub iterations: usize,
    pub backend: String,
    /// Free-form solver message (raw status, failure reason).
    pub message: String,
}

impl ConicSolution {
    pub fn failed(status: SolverStatus, backend: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            y: vec![],
            primal_objective: f64::NAN,
            dual_objective: None,
            eq_duals: vec![],
            block_duals: vec![],
            iterations: 0,
            backend: backend.to_string(),
            message: message.into(),
        }
    }

    /// The dual objective when available, otherwise the primal one.
    pub fn lower_bound(&self) -> f64 {
        self.dual_objective.unwrap_or(self.primal_objective)
    }
}

/// Tolerances and limits shared by all backends.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BackendConfig {
    /// Requested feasibility and relative gap tolerance.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self { tolerance: DEFAULT_TOLERANCE, max_iterations: 200 }
    }
}

/// A solver for [`ConicProblem`]s. Implementations receive problems whose
/// equality rows are linearly independent.
pub trait ConicBackend: Send + Sync {
    fn name(&self) -> &str;
    /// Whether independent solves may run concurrently on this instance.
    fn concurrent(&self) -> bool;
    fn config(&self) -> BackendConfig;
    fn solve_reduced(&self, problem: &ConicProblem) -> Result<ConicSolution, ConicError>;
}

type Factory = Arc<dyn Fn(BackendConfig) -> Box<dyn ConicBackend> + Send + Sync>;

/// Name-indexed constructors of backends.
#[derive(Clone)]
pub struct BackendRegistry {
    factories: BTreeMap<String, Factory>,
}

impl fmt::Debug for BackendRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BackendRegistry").field("names", &self.names()).finish()
    }
}

impl Default for BackendRegistry {
    fn default() -> Self {
        let mut r = Self { factories: BTreeMap::new() };
        r.register("clarabel", |c| Box::new(ClarabelBackend::new(c)));
        r.register("dense-ipm", |c| Box::new(DenseIpmBackend::new(c)));
        r
    }
}

impl BackendRegistry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(BackendConfig) -> Box<dyn ConicBackend> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Arc::new(factory));
    }

    pub fn names(&self) -> Vec<String> {
        self.factories.keys().cloned().collect()
    }

    pub fn create(&self, name: &str, config: BackendConfig) -> Result<Box<dyn ConicBackend>, ConicError> {
        match self.factories.get(name) {
            Some(f) => Ok(f(config)),
            None => Err(ConicError::UnknownBackend(name.to_string(), self.names().join(", "))),
        }
    }
}

/// `SPHERE_SOS_BACKEND` if set and nonempty, else [`DEFAULT_BACKEND`].
pub fn default_backend_name() -> String {
    std::env::var(BACKEND_ENV).ok().filter(|s| !s.is_empty()).unwrap_or_else(|| DEFAULT_BACKEND.to_string())
}

/// The default backend from the built-in registry.
pub fn default_backend() -> Result<Box<dyn ConicBackend>, ConicError> {
    BackendRegistry::default().create(&default_backend_name(), BackendConfig::default())
}

/// Validates, drops redundant equality rows, and runs `backend`. Multipliers
/// of dropped rows are reported as zero. A contradictory equality system
/// yields an infeasible status without calling the backend.
pub fn solve(problem: &ConicProblem, backend: &dyn ConicBackend) -> Result<ConicSolution, ConicError> {
    problem.validate()?;
    let keep = match scan_equalities(problem) {
        EqualityScan::Independent(k) => k,
        EqualityScan::Inconsistent(r) => {
            return Ok(ConicSolution::failed(
                SolverStatus::Infeasible,
                backend.name(),
                format!("equality system is inconsistent (residual {r:e})"),
            ))
        }
    };
    if keep.len() == problem.num_equalities() {
        return backend.solve_reduced(problem);
    }
    log::debug!("presolve dropped {} dependent equality rows", problem.num_equalities() - keep.len());
    let mut reduced = problem.clone();
    reduced.eq_rows = keep.iter().map(|&i| problem.eq_rows[i].clone()).collect();
    reduced.eq_rhs = keep.iter().map(|&i| problem.eq_rhs[i]).collect();
    let mut sol = backend.solve_reduced(&reduced)?;
    if !sol.eq_duals.is_empty() {
        let mut full = vec![0.0; problem.num_equalities()];
        for (&i, &w) in keep.iter().zip(&sol.eq_duals) {
            full[i] = w;
        }
        sol.eq_duals = full;
    }
    Ok(sol)
}
