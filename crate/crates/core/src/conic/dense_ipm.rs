use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use rayon::prelude::*;

use super::{BackendConfig, ConicBackend, ConicError, ConicProblem, ConicSolution, SolverStatus};

/// Dense primal-dual interior-point backend: HKM search direction with
/// Mehrotra predictor-corrector steps from an infeasible starting point.
#[derive(Debug, Clone)]
pub struct DenseIpmBackend {
    config: BackendConfig,
}

impl DenseIpmBackend {
    pub fn new(config: BackendConfig) -> Self {
        Self { config }
    }
}

/// `(row, col, value)` entries of one coefficient matrix.
type Entries = Vec<(usize, usize, f64)>;

/// Most accurate iterate: score, residuals, `y`, `w`, `X`.
type BestIterate = (f64, (f64, f64, f64), DVector<f64>, DVector<f64>, Vec<DMatrix<f64>>);

/// One PSD block with merged, fully symmetric coefficient entries.
struct Block {
    size: usize,
    f0: DMatrix<f64>,
    /// `(variable, [(row, col, value)])` with both triangles listed.
    terms: Vec<(usize, Entries)>,
}

impl Block {
    fn from_problem(b: &super::PsdBlock) -> Self {
        let f0 = b.constant_matrix();
        let mut merged: BTreeMap<usize, BTreeMap<(usize, usize), f64>> = BTreeMap::new();
        for (v, e) in &b.linear {
            let m = merged.entry(*v).or_default();
            *m.entry((e.row, e.col)).or_insert(0.0) += e.value;
            if e.row != e.col {
                *m.entry((e.col, e.row)).or_insert(0.0) += e.value;
            }
        }
        let terms = merged
            .into_iter()
            .map(|(v, m)| (v, m.into_iter().filter(|(_, x)| *x != 0.0).map(|((r, c), x)| (r, c, x)).collect::<Vec<_>>()))
            .filter(|(_, e): &(usize, Vec<_>)| !e.is_empty())
            .collect();
        Self { size: b.size, f0, terms }
    }

    fn apply(&self, y: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for (v, es) in &self.terms {
            let yv = y[*v];
            if yv != 0.0 {
                for &(r, c, x) in es {
                    m[(r, c)] += x * yv;
                }
            }
        }
        m
    }

    fn adjoint_into(&self, z: &DMatrix<f64>, out: &mut [f64]) {
        for (v, es) in &self.terms {
            out[*v] += es.iter().map(|&(r, c, x)| x * z[(r, c)]).sum::<f64>();
        }
    }

    /// Adds `tr(F_i X F_j S^{-1})` into `m[(i, j)]`.
    fn schur_into(&self, x: &DMatrix<f64>, sinv: &DMatrix<f64>, m: &mut DMatrix<f64>) {
        let s = self.size;
        let cols: Vec<(usize, Vec<(usize, f64)>)> = self
            .terms
            .par_iter()
            .map(|(vj, ej)| {
                // G = X F_j S^{-1}
                let g = if ej.len() < 2 * s {
                    let mut g = DMatrix::zeros(s, s);
                    for &(c, d, val) in ej {
                        let xc = x.column(c);
                        let sd = sinv.row(d);
                        g.ger(val, &xc, &sd.transpose(), 1.0);
                    }
                    g
                } else {
                    let mut fj = DMatrix::zeros(s, s);
                    for &(c, d, val) in ej {
                        fj[(c, d)] = val;
                    }
                    x * fj * sinv
                };
                let col = self
                    .terms
                    .iter()
                    .map(|(vi, ei)| (*vi, ei.iter().map(|&(a, b, u)| u * g[(b, a)]).sum::<f64>()))
                    .collect();
                (*vj, col)
            })
            .collect();
        for (vj, col) in cols {
            for (vi, val) in col {
                m[(vi, vj)] += val;
            }
        }
    }
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest `alpha` keeping `x + alpha * dx` PSD (infinite when unconstrained).
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    if x.nrows() == 1 {
        return if dx[(0, 0)] < 0.0 { -x[(0, 0)] / dx[(0, 0)] } else { f64::INFINITY };
    }
    let Some(ch) = Cholesky::new(x.clone()) else {
        return 0.0;
    };
    let l = ch.l();
    let a = l.solve_lower_triangular(dx).unwrap_or_else(|| dx.clone());
    let b = l.solve_lower_triangular(&a.transpose()).unwrap_or(a);
    let lmin = SymmetricEigen::new(sym(&b)).eigenvalues.min();
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

/// Shrinks `alpha` until every block of `m + alpha * dm` admits a Cholesky
/// factorization; returns the accepted step and the new iterate.
fn interior_step(m: &[DMatrix<f64>], dm: &[DMatrix<f64>], mut alpha: f64) -> (f64, Vec<DMatrix<f64>>) {
    for _ in 0..40 {
        let next: Vec<DMatrix<f64>> = m.iter().zip(dm).map(|(a, b)| sym(&(a + b * alpha))).collect();
        if next.iter().all(|b| Cholesky::new(b.clone()).is_some()) {
            return (alpha, next);
        }
        alpha *= 0.7;
    }
    (0.0, m.to_vec())
}

fn inverse_spd(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    Cholesky::new(m.clone()).map(|c| c.inverse())
}

/// Cholesky factor of `D M D` with `D = diag(M)^{-1/2}`.
struct ScaledCholesky {
    d: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl ScaledCholesky {
    fn solve<C: nalgebra::Dim, S: nalgebra::Storage<f64, Dyn, C>>(&self, b: &nalgebra::Matrix<f64, Dyn, C, S>) -> nalgebra::OMatrix<f64, Dyn, C>
    where
        nalgebra::DefaultAllocator: nalgebra::allocator::Allocator<Dyn, C>,
    {
        let mut x = b.clone_owned();
        for (mut row, d) in x.row_iter_mut().zip(self.d.iter()) {
            row *= *d;
        }
        self.chol.solve_mut(&mut x);
        for (mut row, d) in x.row_iter_mut().zip(self.d.iter()) {
            row *= *d;
        }
        x
    }
}

fn chol_with_shift(m: &DMatrix<f64>) -> Option<ScaledCholesky> {
    let d = m.diagonal().map(|v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 });
    let scaled = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * d[i] * d[j]);
    if let Some(chol) = Cholesky::new(scaled.clone()) {
        return Some(ScaledCholesky { d, chol });
    }
    let mut shift = 1e-12;
    for _ in 0..8 {
        let mut mm = scaled.clone();
        for i in 0..mm.nrows() {
            mm[(i, i)] += shift;
        }
        if let Some(chol) = Cholesky::new(mm) {
            return Some(ScaledCholesky { d, chol });
        }
        shift *= 100.0;
    }
    None
}

struct Direction {
    dy: DVector<f64>,
    dw: DVector<f64>,
    ds: Vec<DMatrix<f64>>,
    dx: Vec<DMatrix<f64>>,
}

/// Fixed data of the equality rows `E dy = rp`.
struct Equalities {
    e: DMatrix<f64>,
    /// Orthonormal basis of the null space of `E`.
    null: DMatrix<f64>,
    /// Cholesky factor of `E E^T`.
    eet: Cholesky<f64, Dyn>,
}

impl Equalities {
    fn new(e: DMatrix<f64>) -> Option<Self> {
        let (neq, n) = e.shape();
        let eet = Cholesky::new(&e * e.transpose())?;
        let eig = SymmetricEigen::new(e.transpose() * &e);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let null = DMatrix::from_fn(n, n - neq, |i, j| eig.eigenvectors[(i, order[j])]);
        Some(Self { e, null, eet })
    }

    /// Minimum-norm `v` with `E v = r`.
    fn particular(&self, r: &DVector<f64>) -> DVector<f64> {
        self.e.tr_mul(&self.eet.solve(r))
    }

    /// Least-squares `w` for `E^T w = g`.
    fn multipliers(&self, g: &DVector<f64>) -> DVector<f64> {
        self.eet.solve(&(&self.e * g))
    }
}

struct Workspace<'a> {
    blocks: &'a [Block],
    eq: Option<&'a Equalities>,
    m: DMatrix<f64>,
    /// Factor of `M`, or of `N^T M N` with `N` the null-space basis (none
    /// when the equalities fix `dy`).
    chol: Option<ScaledCholesky>,
}

const REFINE_STEPS: usize = 8;
/// Iterations without a new most-accurate iterate before giving up.
const STALL_ITERATIONS: usize = 15;
/// Residual level of a reduced-accuracy solution (Clarabel's `AlmostSolved` defaults).
const NEAR_OPTIMAL_RESIDUAL: f64 = 5e-5;

impl Workspace<'_> {
    /// Solves `M dy - E^T dw = h`, `E dy = rp` in the null space of `E`.
    fn solve_kkt(&self, h: &DVector<f64>, rp: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let Some(eq) = self.eq else {
            return (self.chol.as_ref().expect("factor without equalities").solve(h), DVector::zeros(0));
        };
        let mut dy = eq.particular(rp);
        if let Some(c) = &self.chol {
            dy += &eq.null * c.solve(&eq.null.tr_mul(&(h - &self.m * &dy)));
        }
        let dw = eq.multipliers(&(&self.m * &dy - h));
        (dy, dw)
    }

    /// `(E^T w, E v)`, empty without equalities.
    fn equality_terms(&self, v: &DVector<f64>, w: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        match self.eq {
            Some(eq) => (eq.e.tr_mul(w), &eq.e * v),
            None => (DVector::zeros(v.len()), DVector::zeros(0)),
        }
    }

    /// Solves the Newton system for a given right-hand side matrix `z` per block.
    fn direction(&self, z: &[DMatrix<f64>], rc: &DVector<f64>, rp: &DVector<f64>, rs: &[DMatrix<f64>], x: &[DMatrix<f64>], sinv: &[DMatrix<f64>]) -> Direction {
        let n = rc.len();
        let mut h = vec![0.0; n];
        for (b, zb) in self.blocks.iter().zip(z) {
            b.adjoint_into(&sym(zb), &mut h);
        }
        let h = DVector::from_vec(h) - rc;
        let (mut dy, mut dw) = self.solve_kkt(&h, rp);
        // refine against the operator that recovers dX, not the assembled M
        let schur_apply = |v: &DVector<f64>| {
            let mut out = vec![0.0; n];
            for (i, b) in self.blocks.iter().enumerate() {
                b.adjoint_into(&sym(&(&x[i] * b.apply(v.as_slice()) * &sinv[i])), &mut out);
            }
            DVector::from_vec(out)
        };
        let residual = |dy: &DVector<f64>, dw: &DVector<f64>| {
            let (etw, ev) = self.equality_terms(dy, dw);
            (&h - (schur_apply(dy) - etw), rp - ev)
        };
        let (mut r1, mut r2) = residual(&dy, &dw);
        for _ in 0..REFINE_STEPS {
            let (cy, cw) = self.solve_kkt(&r1, &r2);
            let (ny, nw) = (&dy + cy, &dw + cw);
            let (n1, n2) = residual(&ny, &nw);
            if n1.norm() + n2.norm() >= r1.norm() + r2.norm() {
                break;
            }
            (dy, dw, r1, r2) = (ny, nw, n1, n2);
        }
        let dyv = dy.as_slice();
        let mut ds = Vec::with_capacity(self.blocks.len());
        let mut dx = Vec::with_capacity(self.blocks.len());
        for (i, b) in self.blocks.iter().enumerate() {
            let ady = b.apply(dyv);
            let dxb = sym(&(&z[i] - &x[i] * &ady * &sinv[i]));
            ds.push(ady + &rs[i]);
            dx.push(dxb);
        }
        Direction { dy, dw, ds, dx }
    }
}

impl ConicBackend for DenseIpmBackend {
    fn name(&self) -> &str {
        "dense-ipm"
    }

    fn concurrent(&self) -> bool {
        true
    }

    fn config(&self) -> BackendConfig {
        self.config
    }

    fn solve_reduced(&self, p: &ConicProblem) -> Result<ConicSolution, ConicError> {
        let sol = self.run(p)?;
        if sol.status != SolverStatus::NumericalFailure || p.blocks.is_empty() {
            return Ok(sol);
        }
        match self.max_violation(p)? {
            Some(v) if v > INFEASIBILITY_MARGIN.max(100.0 * self.config.tolerance) => {
                let mut out = ConicSolution::failed(
                    SolverStatus::Infeasible,
                    self.name(),
                    format!("{}; every point violates a block by at least {v:.3e}", sol.message),
                );
                out.iterations = sol.iterations;
                Ok(out)
            }
            _ => Ok(sol),
        }
    }
}

/// Smallest violation certified by the auxiliary problem before a failed
/// solve is reported as infeasible.
const INFEASIBILITY_MARGIN: f64 = 1e-6;

impl DenseIpmBackend {
    /// Solves `min s` subject to the equalities and `F_k(y) + s I >= 0`,
    /// `s >= -1`. A positive optimum means the original problem has no
    /// feasible point. `None` when the auxiliary solve fails.
    fn max_violation(&self, p: &ConicProblem) -> Result<Option<f64>, ConicError> {
        let mut aux = p.clone();
        aux.objective.iter_mut().for_each(|c| *c = 0.0);
        aux.offset = 0.0;
        let s = aux.add_var("violation", 1.0);
        for b in &mut aux.blocks {
            for i in 0..b.size {
                b.add(s, i, i, 1.0);
            }
        }
        let mut floor = super::PsdBlock::new(1);
        floor.add(s, 0, 0, 1.0);
        floor.add_constant(0, 0, 1.0);
        aux.add_block(floor);
        let sol = self.run(&aux)?;
        Ok(sol.status.has_solution().then(|| sol.y[s]))
    }

    fn run(&self, p: &ConicProblem) -> Result<ConicSolution, ConicError> {
        let n = p.num_vars();
        let neq = p.num_equalities();
        let tol = self.config.tolerance;
        let blocks: Vec<Block> = p.blocks.iter().map(Block::from_problem).collect();
        let mut e = DMatrix::zeros(neq, n);
        for (r, row) in p.eq_rows.iter().enumerate() {
            for &(v, c) in row {
                e[(r, v)] += c;
            }
        }
        let g = DVector::from_column_slice(&p.eq_rhs);
        let eq = match neq {
            0 => None,
            _ => Some(Equalities::new(e.clone()).ok_or_else(|| ConicError::Backend("dependent equality rows".into()))?),
        };
        let c = DVector::from_column_slice(&p.objective);
        let cone_dim: f64 = blocks.iter().map(|b| b.size as f64).sum();

        let data_scale = 1.0 + blocks.iter().map(|b| b.f0.amax()).fold(0.0, f64::max) + g.amax() + c.amax();
        let x0 = data_scale.max(10.0);
        let mut y = DVector::zeros(n);
        let mut w = DVector::zeros(neq);
        let mut x: Vec<DMatrix<f64>> = blocks.iter().map(|b| DMatrix::identity(b.size, b.size) * x0).collect();
        let mut s: Vec<DMatrix<f64>> = x.clone();

        let norm_c = 1.0 + c.norm();
        let norm_b = 1.0 + g.norm() + blocks.iter().map(|b| b.f0.norm()).sum::<f64>();
        let mut status = SolverStatus::NumericalFailure;
        let mut message = String::from("iteration limit");
        let mut iters = 0;
        let mut last = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut best_iter = 0;
        let mut best: Option<BestIterate> = None;

        for it in 0..self.config.max_iterations {
            iters = it;
            let yv = y.as_slice().to_vec();
            let rs: Vec<DMatrix<f64>> = blocks.iter().zip(&s).map(|(b, sb)| &b.f0 + b.apply(&yv) - sb).collect();
            let mut ax = vec![0.0; n];
            for (b, xb) in blocks.iter().zip(&x) {
                b.adjoint_into(xb, &mut ax);
            }
            let rc = &c - e.transpose() * &w - DVector::from_vec(ax);
            let rp = &g - &e * &y;
            let gap: f64 = x.iter().zip(&s).map(|(a, b)| a.dot(b)).sum();
            let mu = gap / cone_dim.max(1.0);
            let pobj = c.dot(&y);
            let dobj = g.dot(&w) - blocks.iter().zip(&x).map(|(b, xb)| b.f0.dot(xb)).sum::<f64>();
            let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            let pinf = (rs.iter().map(|r| r.norm_squared()).sum::<f64>() + rp.norm_squared()).sqrt() / norm_b;
            let dinf = rc.norm() / norm_c;
            last = (rel_gap, pinf, dinf);
            let score = rel_gap.max(pinf).max(dinf);
            if best.as_ref().is_none_or(|b| score < b.0) {
                best = Some((score, last, y.clone(), w.clone(), x.clone()));
                best_iter = it;
            } else if it - best_iter >= STALL_ITERATIONS {
                message = "no progress".into();
                break;
            }
            log::trace!("ipm it={it} pobj={pobj:.10e} dobj={dobj:.10e} gap={rel_gap:.2e} pinf={pinf:.2e} dinf={dinf:.2e} mu={mu:.2e}");
            if rel_gap <= tol && pinf <= tol && dinf <= tol {
                status = SolverStatus::Optimal;
                message = "converged".into();
                break;
            }
            let xnorm: f64 = x.iter().map(|m| m.amax()).fold(w.amax(), f64::max);
            let ynorm: f64 = s.iter().map(|m| m.amax()).fold(y.amax(), f64::max);
            if xnorm > 1e10 * x0 && dinf < 1e-6 && pinf > 1e-6 {
                status = SolverStatus::Infeasible;
                message = "dual iterates diverge with primal residual bounded away from zero".into();
                break;
            }
            if ynorm > 1e10 * x0 && pinf < 1e-6 && dinf > 1e-6 {
                status = SolverStatus::Unbounded;
                message = "primal iterates diverge with dual residual bounded away from zero".into();
                break;
            }

            let Some(sinv) = s.iter().map(inverse_spd).collect::<Option<Vec<_>>>() else {
                message = "slack lost definiteness".into();
                break;
            };
            let mut m = DMatrix::zeros(n, n);
            for (i, b) in blocks.iter().enumerate() {
                b.schur_into(&x[i], &sinv[i], &mut m);
            }
            let m = sym(&m);
            let reduced = match &eq {
                Some(q) => sym(&(q.null.transpose() * &m * &q.null)),
                None => m.clone(),
            };
            let chol = if reduced.nrows() == 0 {
                None
            } else if let Some(c) = chol_with_shift(&reduced) {
                Some(c)
            } else {
                message = "Schur complement is not positive definite".into();
                break;
            };
            let ws = Workspace { blocks: &blocks, eq: eq.as_ref(), m, chol };

            // predictor
            let base: Vec<DMatrix<f64>> = (0..blocks.len()).map(|i| -&x[i] - &x[i] * &rs[i] * &sinv[i]).collect();
            let aff = ws.direction(&base, &rc, &rp, &rs, &x, &sinv);
            let step = |d: &Direction| {
                let ap = s.iter().zip(&d.ds).map(|(a, b)| max_step(a, b)).fold(f64::INFINITY, f64::min);
                let ad = x.iter().zip(&d.dx).map(|(a, b)| max_step(a, b)).fold(f64::INFINITY, f64::min);
                ((0.98 * ap).min(1.0), (0.98 * ad).min(1.0))
            };
            let (ap, ad) = step(&aff);
            let mu_aff: f64 = x
                .iter()
                .zip(&s)
                .zip(aff.dx.iter().zip(&aff.ds))
                .map(|((xb, sb), (dxb, dsb))| (xb + dxb * ad).dot(&(sb + dsb * ap)))
                .sum::<f64>()
                / cone_dim.max(1.0);
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            // corrector
            let corr: Vec<DMatrix<f64>> = (0..blocks.len())
                .map(|i| {
                    &base[i] + &sinv[i] * (sigma * mu) - &aff.dx[i] * &aff.ds[i] * &sinv[i]
                })
                .collect();
            let d = ws.direction(&corr, &rc, &rp, &rs, &x, &sinv);
            let (ap, ad) = step(&d);
            let (ap, s_next) = interior_step(&s, &d.ds, ap);
            let (ad, x_next) = interior_step(&x, &d.dx, ad);
            y += &d.dy * ap;
            w += &d.dw * ad;
            s = s_next;
            x = x_next;
            if ap < 1e-10 && ad < 1e-10 {
                message = "step length collapsed".into();
                break;
            }
        }
        if status == SolverStatus::NumericalFailure {
            // fall back to the most accurate iterate seen
            if let Some((_, res, by, bw, bx)) = best {
                last = res;
                y = by;
                w = bw;
                x = bx;
            }
        }
        message = format!("{message} (gap {:.2e}, primal residual {:.2e}, dual residual {:.2e})", last.0, last.1, last.2);
        if status == SolverStatus::NumericalFailure && last.0.max(last.1).max(last.2) <= NEAR_OPTIMAL_RESIDUAL {
            status = SolverStatus::NearOptimal;
        }
        if !status.has_solution() {
            let mut out = ConicSolution::failed(status, self.name(), message);
            out.iterations = iters;
            return Ok(out);
        }
        let y = y.as_slice().to_vec();
        let w = w.as_slice().to_vec();
        Ok(ConicSolution {
            status,
            primal_objective: p.primal_objective(&y),
            dual_objective: Some(p.dual_objective(&w, &x)),
            y,
            eq_duals: w,
            block_duals: x,
            iterations: iters,
            backend: self.name().to_string(),
            message,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_cholesky_solves_badly_scaled_systems() {
        let d = DVector::from_vec(vec![1e-6, 1.0, 1e6]);
        let base = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let m = DMatrix::from_fn(3, 3, |i, j| base[(i, j)] * d[i] * d[j]);
        let x = DVector::from_vec(vec![1.0, -2.0, 3e-6]);
        let b = &m * &x;
        let got = chol_with_shift(&m).unwrap().solve(&b);
        assert!(((&got - &x).component_div(&x)).amax() < 1e-9);
    }

    #[test]
    fn null_space_kkt() {
        let e = DMatrix::from_row_slice(2, 4, &[1.0, 1.0, 0.0, 0.0, 0.0, 1.0, -1.0, 2.0]);
        let eq = Equalities::new(e.clone()).unwrap();
        assert_eq!(eq.null.ncols(), 2);
        assert!((&e * &eq.null).amax() < 1e-12);
        assert!((eq.null.tr_mul(&eq.null) - DMatrix::identity(2, 2)).amax() < 1e-12);
        let r = DVector::from_vec(vec![1.0, -3.0]);
        assert!((&e * eq.particular(&r) - &r).amax() < 1e-12);
        let w = DVector::from_vec(vec![0.5, 2.0]);
        assert!((eq.multipliers(&e.tr_mul(&w)) - w).amax() < 1e-12);
    }
}
