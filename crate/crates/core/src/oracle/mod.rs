//! Independent minimizers used as ground truth for relaxation lower bounds.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::poly::{CompiledGradient, RealPoly};
use crate::set::{SetDescriptor, SetError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("grid with {0} points exceeds the limit of {GRID_LIMIT}")]
    GridTooLarge(u128),
    #[error("grid search needs spheres of dimension 2 or 3 (got {0})")]
    GridUnsupported(usize),
}

pub const GRID_LIMIT: u128 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Grid,
    Multistart,
    SvdExact,
}

/// Multistart budget.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OracleBudget {
    pub restarts: usize,
    pub iterations: usize,
    pub initial_step: f64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { restarts: 64, iterations: 500, initial_step: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OracleResult {
    pub min_estimate: f64,
    pub argmin: Vec<f64>,
    pub method: OracleMethod,
    /// Restarts for multistart, points per sphere (or per coordinate) for grid.
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// True when the best local search hit its iteration limit.
    pub exhausted: bool,
}

fn restart_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

/// Multistart projected gradient descent. Restart `i` draws its start from
/// a stream determined by `(seed, i)` alone, so a larger budget only adds
/// candidates and never raises the estimate.
pub fn minimize(q: &RealPoly, set: &SetDescriptor, budget: OracleBudget, seed: u64) -> Result<OracleResult, OracleError> {
    set.check_layout(q.layout())?;
    let grad = CompiledGradient::new(q);
    let dim = set.dim();
    let restarts = budget.restarts.max(1);
    let best = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = restart_rng(seed, i);
            let mut start = vec![0.0; dim];
            set.sample(&mut rng, &mut start);
            let d = set.descend(&grad, &start, budget.iterations, budget.initial_step);
            (q.eval(&d.point), i, d)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("at least one restart");
    Ok(OracleResult {
        min_estimate: best.0,
        argmin: best.2.point,
        method: OracleMethod::Multistart,
        restarts,
        iterations: budget.iterations,
        seed,
        exhausted: !best.2.converged,
    })
}

/// `min_x q` as above, and `max_x q` obtained from `-q`.
pub fn range_estimate(q: &RealPoly, set: &SetDescriptor, budget: OracleBudget, seed: u64) -> Result<(OracleResult, OracleResult), OracleError> {
    let lo = minimize(q, set, budget, seed)?;
    let mut hi = minimize(&q.scale(-1.0), set, budget, seed.wrapping_add(1))?;
    hi.min_estimate = q.eval(&hi.argmin);
    Ok((lo, hi))
}

fn sphere_grid(n: usize, res: usize) -> Result<Vec<Vec<f64>>, OracleError> {
    use std::f64::consts::PI;
    match n {
        2 => Ok((0..res).map(|i| {
            let a = 2.0 * PI * i as f64 / res as f64;
            vec![a.cos(), a.sin()]
        }).collect()),
        3 => {
            let mut pts = vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0]];
            for i in 1..res {
                let th = PI * i as f64 / res as f64;
                for j in 0..2 * res {
                    let ph = PI * j as f64 / res as f64;
                    pts.push(vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
                }
            }
            Ok(pts)
        }
        _ => Err(OracleError::GridUnsupported(n)),
    }
}

/// Exhaustive grid search followed by a local polish of the best node.
/// Spheres must be circles or 2-spheres (`res` angular steps); cube
/// coordinates take `res` equispaced values including the endpoints.
pub fn grid_minimize(q: &RealPoly, set: &SetDescriptor, res: usize) -> Result<OracleResult, OracleError> {
    set.check_layout(q.layout())?;
    let res = res.max(2);
    let factors: Vec<Vec<Vec<f64>>> = match *set {
        SetDescriptor::SphereProduct { m, n } => {
            let g = sphere_grid(n, res)?;
            vec![g; m]
        }
        SetDescriptor::Hypercube { n } => {
            let pts: Vec<Vec<f64>> = (0..res).map(|i| vec![-1.0 + 2.0 * i as f64 / (res - 1) as f64]).collect();
            vec![pts; n]
        }
    };
    let total: u128 = factors.iter().map(|f| f.len() as u128).product();
    if total > GRID_LIMIT {
        return Err(OracleError::GridTooLarge(total));
    }
    let compiled = crate::poly::CompiledPoly::new(q);
    let mut idx = vec![0usize; factors.len()];
    let mut x = Vec::with_capacity(set.dim());
    let mut best = (f64::INFINITY, vec![]);
    loop {
        x.clear();
        for (f, &i) in factors.iter().zip(&idx) {
            x.extend_from_slice(&f[i]);
        }
        let v = compiled.eval(&x);
        if v < best.0 {
            best = (v, x.clone());
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                let grad = CompiledGradient::new(q);
                let d = set.descend(&grad, &best.1, OracleBudget::default().iterations, 0.1);
                let (value, point) = if q.eval(&d.point) <= best.0 { (q.eval(&d.point), d.point) } else { best };
                return Ok(OracleResult {
                    min_estimate: value,
                    argmin: point,
                    method: OracleMethod::Grid,
                    restarts: res,
                    iterations: 0,
                    seed: 0,
                    exhausted: false,
                });
            }
            idx[k] += 1;
            if idx[k] < factors[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Exact minimum of `x^T A y` over pairs of unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearOptimum {
    pub value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// `-sigma_max(A)`, attained at `x = -u_1`, `y = v_1`.
pub fn bilinear_exact(a: &DMatrix<f64>) -> BilinearOptimum {
    let svd = a.clone().svd(true, true);
    let (k, smax) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    BilinearOptimum {
        value: -smax,
        x: u.column(k).iter().map(|v| -v).collect(),
        y: vt.row(k).iter().copied().collect(),
    }
}

impl BilinearOptimum {
    pub fn into_oracle_result(self) -> OracleResult {
        let mut argmin = self.x;
        argmin.extend(self.y);
        OracleResult {
            min_estimate: self.value,
            argmin,
            method: OracleMethod::SvdExact,
            restarts: 0,
            iterations: 0,
            seed: 0,
            exhausted: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Monomial, VariableLayout};

    fn bilinear(a: &DMatrix<f64>) -> RealPoly {
        let n = a.nrows();
        let l = VariableLayout::bipartite(n);
        let terms = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| {
            let mut e = vec![0u16; 2 * n];
            e[i] = 1;
            e[n + j] += 1;
            (Monomial::from_exponents(e), a[(i, j)])
        });
        RealPoly::from_terms(&l, terms).unwrap()
    }

    #[test]
    fn norm_square_is_one_on_sphere() {
        let l = VariableLayout::single(4);
        let q = RealPoly::block_norm_sq(&l, 0);
        let r = minimize(&q, &SetDescriptor::sphere_product(1, 4).unwrap(), OracleBudget::default(), 3).unwrap();
        assert!((r.min_estimate - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inner_product_and_coordinate() {
        let q = bilinear(&DMatrix::identity(3, 3));
        let set = SetDescriptor::sphere_product(2, 3).unwrap();
        let r = minimize(&q, &set, OracleBudget::default(), 11).unwrap();
        assert!((r.min_estimate + 1.0).abs() < 1e-8);
        assert!(set.violation(&r.argmin) < 1e-9);
        assert!((q.eval(&r.argmin) - r.min_estimate).abs() < 1e-10);

        let l = VariableLayout::single(3);
        let x1 = RealPoly::var(&l, 0);
        let r = minimize(&x1, &SetDescriptor::sphere_product(1, 3).unwrap(), OracleBudget::default(), 5).unwrap();
        assert!((r.min_estimate + 1.0).abs() < 1e-8);
    }

    #[test]
    fn svd_oracle() {
        assert!((bilinear_exact(&DMatrix::identity(3, 3)).value + 1.0).abs() < 1e-14);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 0.0]));
        let b = bilinear_exact(&d);
        assert!((b.value + 3.0).abs() < 1e-14);
        let q = bilinear(&d);
        let mut p = b.x.clone();
        p.extend(&b.y);
        assert!((q.eval(&p) - b.value).abs() < 1e-12);
    }

    #[test]
    fn grid_agrees_with_multistart_on_circle() {
        let l = VariableLayout::single(2);
        let q = RealPoly::from_terms(&l, [(Monomial::from_exponents(vec![3, 0]), 1.0), (Monomial::from_exponents(vec![0, 1]), 0.5)]).unwrap();
        let set = SetDescriptor::sphere_product(1, 2).unwrap();
        let g = grid_minimize(&q, &set, 720).unwrap();
        let m = minimize(&q, &set, OracleBudget::default(), 0).unwrap();
        assert!((g.min_estimate - m.min_estimate).abs() < 1e-9);
    }

    #[test]
    fn cube_grid_finds_corner() {
        let l = VariableLayout::single(2);
        let q = RealPoly::from_terms(&l, [(Monomial::from_exponents(vec![1, 1]), 1.0)]).unwrap();
        let g = grid_minimize(&q, &SetDescriptor::hypercube(2).unwrap(), 5).unwrap();
        assert_eq!(g.min_estimate, -1.0);
    }
}
