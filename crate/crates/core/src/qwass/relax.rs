use crate::conic::{ConicBackend, SolverStatus};
use crate::moment::{build_from_spec, solve, MomentProblem, MomentSpec, SphereEncoding, MAX_MOMENT_SIDE};
use crate::poly::{Monomial, RealPoly};

use super::{kappa_bound, real_layout, real_objective, QuantumState, QwassError};

/// Moment relaxation of the squared Wasserstein distance at order `t`
/// (moments up to degree `2t`) over `(a, b, c, d)`.
pub fn build_w2_relaxation(rho: &QuantumState, nu: &QuantumState, t: usize) -> Result<MomentProblem, QwassError> {
    build_w2_relaxation_with(rho, nu, t, SphereEncoding::default())
}

pub fn build_w2_relaxation_with(
    rho: &QuantumState,
    nu: &QuantumState,
    t: usize,
    encoding: SphereEncoding,
) -> Result<MomentProblem, QwassError> {
    let n = rho.dim();
    if nu.dim() != n {
        return Err(QwassError::DimensionMismatch(n, nu.dim()));
    }
    if t < 2 {
        return Err(QwassError::OrderTooSmall(t));
    }
    let spec = MomentSpec {
        nvars: 4 * n,
        order: t,
        spheres: vec![(0..2 * n).collect(), (2 * n..4 * n).collect()],
        boxes: vec![],
        encoding,
        max_side: MAX_MOMENT_SIDE,
    };
    let mut problem = build_from_spec(&real_objective(n), &spec)?;
    let l = real_layout(n);
    let v = |k: usize| RealPoly::var(&l, k);
    for (offset, state) in [(0, rho), (2 * n, nu)] {
        let (re, im) = (offset, offset + n);
        let m = state.matrix();
        for i in 0..n {
            for j in i..n {
                let sym = &(&v(re + i) * &v(re + j)) + &(&v(im + i) * &v(im + j));
                problem.add_moment_equality(&sym, m[(i, j)].re)?;
                if i != j {
                    let anti = &(&v(im + i) * &v(re + j)) - &(&v(re + i) * &v(im + j));
                    problem.add_moment_equality(&anti, m[(i, j)].im)?;
                }
            }
        }
    }
    Ok(problem)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct W2Result {
    pub t: usize,
    /// Signed lower bound on the squared distance.
    pub w2_squared_lower: f64,
    /// `sqrt(max(0, w2_squared_lower))`.
    pub w2: f64,
    pub kappa_over_t2: f64,
    pub status: SolverStatus,
    /// Whether `t >= 32 n`, where the error bound applies.
    pub certified: bool,
    /// Moment of the constant polynomial.
    #[serde(skip)]
    pub mass: f64,
    /// Solver message.
    #[serde(skip)]
    pub message: String,
}

pub fn solve_w2(rho: &QuantumState, nu: &QuantumState, t: usize, backend: &dyn ConicBackend) -> Result<W2Result, QwassError> {
    let problem = build_w2_relaxation(rho, nu, t)?;
    let r = solve(&problem, backend)?;
    let n = rho.dim();
    let kappa = kappa_bound(n)?.value;
    let mass = if r.status.has_solution() {
        problem.moment_value(&r.moments, &Monomial::one(4 * n))?
    } else {
        f64::NAN
    };
    Ok(W2Result {
        t,
        w2_squared_lower: r.lower_bound,
        w2: r.lower_bound.max(0.0).sqrt(),
        kappa_over_t2: kappa / (t * t) as f64,
        status: r.status,
        certified: t >= 32 * n,
        mass,
        message: r.message,
    })
}
