use rayon::prelude::*;

use super::{build_relaxation_with, solve, MomentError, SphereEncoding};
use crate::conic::{ConicBackend, SolverStatus};
use crate::kernel;
use crate::oracle::{range_estimate, OracleBudget};
use crate::poly::RealPoly;
use crate::set::SetDescriptor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub encoding: SphereEncoding,
    pub budget: OracleBudget,
    pub seed: u64,
    /// Solve orders concurrently when the backend allows it.
    pub parallel: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { encoding: SphereEncoding::default(), budget: OracleBudget::default(), seed: 0, parallel: true }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub t: usize,
    pub lower_bound: f64,
    pub oracle_min: f64,
    pub gap: f64,
    pub theory_bound: f64,
    pub certificate_degree: usize,
    pub status: SolverStatus,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// Oracle estimates of the minimum and maximum of `q` on the set.
    pub q_min: f64,
    pub q_max: f64,
}

/// Rate-theorem bound on `q_min - lb_t` for a polynomial of degree `d` and
/// range width `width`. The kernel degree per sphere is `t / m`, hence the
/// factor `m^2`. NaN for the hypercube.
pub fn theory_bound(set: &SetDescriptor, d: usize, t: usize, width: f64) -> Result<f64, MomentError> {
    match *set {
        SetDescriptor::SphereProduct { m, n } => {
            let c = if m == 2 { kernel::c_bisphere(n, d)? } else { kernel::c_multisphere(n, d, m)? };
            let (mf, tf) = (m as f64, t as f64);
            Ok(c * mf * mf / (tf * tf) * width)
        }
        SetDescriptor::Hypercube { .. } => Ok(f64::NAN),
    }
}

/// Solves the relaxation at every order in `t_list` (strictly ascending) and
/// compares with the oracle minimum.
pub fn hierarchy_sweep(
    q: &RealPoly,
    set: &SetDescriptor,
    t_list: &[usize],
    backend: &dyn ConicBackend,
    options: &SweepOptions,
) -> Result<Sweep, MomentError> {
    if t_list.is_empty() || t_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MomentError::InvalidOrders(t_list.to_vec()));
    }
    let (lo, hi) = range_estimate(q, set, options.budget, options.seed)?;
    let (q_min, q_max) = (lo.min_estimate, hi.min_estimate);
    let d = q.degree();
    let row = |t: usize| -> Result<SweepRow, MomentError> {
        let problem = build_relaxation_with(q, set, t, options.encoding)?;
        let r = solve(&problem, backend)?;
        Ok(SweepRow {
            t,
            lower_bound: r.lower_bound,
            oracle_min: q_min,
            gap: q_min - r.lower_bound,
            theory_bound: theory_bound(set, d, t, q_max - q_min)?,
            certificate_degree: r.certificate_degree,
            status: r.status,
        })
    };
    let rows: Result<Vec<SweepRow>, MomentError> = if options.parallel && backend.concurrent() {
        t_list.par_iter().map(|&t| row(t)).collect()
    } else {
        t_list.iter().map(|&t| row(t)).collect()
    };
    Ok(Sweep { rows: rows?, q_min, q_max })
}
