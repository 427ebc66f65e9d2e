use std::collections::BTreeMap;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, NonnegativeConeT, PSDTriangleConeT, SolverStatus as ClStatus,
    SupportedConeT, ZeroConeT,
};
use nalgebra::DMatrix;

use super::{BackendConfig, ConicBackend, ConicError, ConicProblem, ConicSolution, SolverStatus};

/// Sparse interior-point backend built on the Clarabel solver.
#[derive(Debug, Clone)]
pub struct ClarabelBackend {
    config: BackendConfig,
}

/// Largest PSD block side accepted; the KKT system holds a dense block of
/// squared triangle dimension.
pub const MAX_BLOCK_SIDE: usize = 100;

impl ClarabelBackend {
    pub fn new(config: BackendConfig) -> Self {
        Self { config }
    }
}

/// Position of `(row, col)`, `row <= col`, in the scaled upper-triangle
/// column-major vectorization.
fn svec_index(row: usize, col: usize) -> usize {
    col * (col + 1) / 2 + row
}

fn map_status(s: ClStatus) -> SolverStatus {
    match s {
        ClStatus::Solved => SolverStatus::Optimal,
        ClStatus::AlmostSolved => SolverStatus::NearOptimal,
        ClStatus::PrimalInfeasible | ClStatus::AlmostPrimalInfeasible => SolverStatus::Infeasible,
        ClStatus::DualInfeasible | ClStatus::AlmostDualInfeasible => SolverStatus::Unbounded,
        _ => SolverStatus::NumericalFailure,
    }
}

impl ConicBackend for ClarabelBackend {
    fn name(&self) -> &str {
        "clarabel"
    }

    fn concurrent(&self) -> bool {
        true
    }

    fn config(&self) -> BackendConfig {
        self.config
    }

    fn solve_reduced(&self, p: &ConicProblem) -> Result<ConicSolution, ConicError> {
        let n = p.num_vars();
        let neq = p.num_equalities();
        let scalar_blocks: Vec<usize> = (0..p.blocks.len()).filter(|&b| p.blocks[b].size == 1).collect();
        let matrix_blocks: Vec<usize> = (0..p.blocks.len()).filter(|&b| p.blocks[b].size > 1).collect();
        if let Some(&big) = matrix_blocks.iter().find(|&&b| p.blocks[b].size > MAX_BLOCK_SIDE) {
            return Err(ConicError::Backend(format!(
                "PSD block of side {} exceeds the clarabel limit {MAX_BLOCK_SIDE} (its dense KKT block would not fit in memory); use the dense-ipm backend",
                p.blocks[big].size
            )));
        }

        // (col, row) -> value, so the map iterates in CSC order
        let mut a: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut rhs = Vec::new();
        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
        for (r, row) in p.eq_rows.iter().enumerate() {
            for &(v, c) in row {
                *a.entry((v, r)).or_insert(0.0) += c;
            }
        }
        rhs.extend_from_slice(&p.eq_rhs);
        if neq > 0 {
            cones.push(ZeroConeT(neq));
        }
        let mut offsets = vec![0usize; p.blocks.len()];
        for &b in &scalar_blocks {
            let r = rhs.len();
            offsets[b] = r;
            let blk = &p.blocks[b];
            rhs.push(blk.constant.iter().map(|e| e.value).sum());
            for (v, e) in &blk.linear {
                *a.entry((*v, r)).or_insert(0.0) -= e.value;
            }
        }
        if !scalar_blocks.is_empty() {
            cones.push(NonnegativeConeT(scalar_blocks.len()));
        }
        for &b in &matrix_blocks {
            let blk = &p.blocks[b];
            let base = rhs.len();
            offsets[b] = base;
            rhs.extend(std::iter::repeat_n(0.0, blk.size * (blk.size + 1) / 2));
            let w = |row: usize, col: usize| if row == col { 1.0 } else { std::f64::consts::SQRT_2 };
            for e in &blk.constant {
                rhs[base + svec_index(e.row, e.col)] += w(e.row, e.col) * e.value;
            }
            for (v, e) in &blk.linear {
                *a.entry((*v, base + svec_index(e.row, e.col))).or_insert(0.0) -= w(e.row, e.col) * e.value;
            }
            cones.push(PSDTriangleConeT(blk.size));
        }
        let m = rhs.len();
        let mut colptr = vec![0usize; n + 1];
        let mut rowval = Vec::with_capacity(a.len());
        let mut nzval = Vec::with_capacity(a.len());
        for (&(col, row), &val) in &a {
            if val == 0.0 {
                continue;
            }
            colptr[col + 1] += 1;
            rowval.push(row);
            nzval.push(val);
        }
        for c in 0..n {
            colptr[c + 1] += colptr[c];
        }
        let amat = CscMatrix::new(m, n, colptr, rowval, nzval);
        let pmat = CscMatrix::<f64>::zeros((n, n));
        let tol = self.config.tolerance;
        let settings = DefaultSettingsBuilder::default()
            .verbose(log::log_enabled!(log::Level::Trace))
            .max_iter(self.config.max_iterations as u32)
            .tol_gap_abs(tol)
            .tol_gap_rel(tol)
            .tol_feas(tol)
            .tol_ktratio(1e-7)
            .chordal_decomposition_enable(false)
            .direct_solve_method("faer".into())
            .build()
            .map_err(|e| ConicError::Backend(format!("settings: {e:?}")))?;
        let mut solver = DefaultSolver::new(&pmat, &p.objective, &amat, &rhs, &cones, settings)
            .map_err(|e| ConicError::Backend(format!("setup: {e:?}")))?;
        solver.solve();
        let sol = &solver.solution;
        let status = map_status(sol.status);
        let raw = format!("{:?}", sol.status);
        if !status.has_solution() {
            let mut out = ConicSolution::failed(status, self.name(), raw);
            out.iterations = sol.iterations as usize;
            return Ok(out);
        }
        let z = &sol.z;
        let eq_duals: Vec<f64> = z[..neq].iter().map(|v| -v).collect();
        let mut block_duals: Vec<DMatrix<f64>> = p.blocks.iter().map(|b| DMatrix::zeros(b.size, b.size)).collect();
        for &b in &scalar_blocks {
            block_duals[b][(0, 0)] = z[offsets[b]];
        }
        for &b in &matrix_blocks {
            let size = p.blocks[b].size;
            let x = &mut block_duals[b];
            for col in 0..size {
                for row in 0..=col {
                    let v = z[offsets[b] + svec_index(row, col)];
                    if row == col {
                        x[(row, col)] = v;
                    } else {
                        x[(row, col)] = v * std::f64::consts::FRAC_1_SQRT_2;
                        x[(col, row)] = v * std::f64::consts::FRAC_1_SQRT_2;
                    }
                }
            }
        }
        let y = sol.x.clone();
        Ok(ConicSolution {
            status,
            primal_objective: p.primal_objective(&y),
            dual_objective: Some(p.dual_objective(&eq_duals, &block_duals)),
            y,
            eq_duals,
            block_duals,
            iterations: sol.iterations as usize,
            backend: self.name().to_string(),
            message: raw,
        })
    }
}
