//! Eigenvalue sequences of perturbed zonal kernels, found by a small SDP.

use nalgebra::DMatrix;

use super::KernelError;
use crate::conic::{self, ConicBackend, ConicProblem, PsdBlock};
use crate::ortho::{expansion_operators, gram_coefficients, GramBasis};

/// `lambda_0..lambda_{2t}` of a kernel `sum_k lambda_k G_k(x . x')` whose
/// univariate profile is a sum of squares with Gram matrix `gram`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaVector {
    pub n: usize,
    pub d: usize,
    pub t: usize,
    pub values: Vec<f64>,
    /// Gram matrix in the basis `basis`; `None` for the unit sequence.
    pub gram: Option<DMatrix<f64>>,
    pub basis: GramBasis,
    /// `sum_{k=1}^{d} (1 - lambda_k)`.
    pub deficit: f64,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct LambdaDoc {
    n: usize,
    d: usize,
    t: usize,
    values: Vec<f64>,
    deficit: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis: Option<GramBasis>,
    /// Rows of the lower triangle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gram: Option<Vec<Vec<f64>>>,
}

impl LambdaVector {
    /// All eigenvalues one: the unperturbed reproducing kernel.
    pub fn unit(n: usize, t: usize) -> Self {
        Self { n, d: 0, t, values: vec![1.0; 2 * t + 1], gram: None, basis: GramBasis::Orthonormal, deficit: 0.0 }
    }

    /// Eigenvalue of harmonic degree `k`; zero beyond `2t`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(0.0)
    }

    /// Deficit bound `n^2 d^3 / t^2`.
    pub fn deficit_bound(&self) -> f64 {
        deficit_bound(self.n, self.d, self.t)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gram = self.gram.as_ref().map(|g| (0..g.nrows()).map(|i| (0..=i).map(|j| g[(i, j)]).collect()).collect());
        let doc = LambdaDoc {
            n: self.n,
            d: self.d,
            t: self.t,
            values: self.values.clone(),
            deficit: self.deficit,
            basis: self.gram.as_ref().map(|_| self.basis),
            gram,
        };
        serde_json::to_value(doc).expect("plain data")
    }

    pub fn from_json_str(s: &str) -> Result<Self, KernelError> {
        let doc: LambdaDoc = serde_json::from_str(s).map_err(|e| KernelError::Json(e.to_string()))?;
        if doc.values.len() != 2 * doc.t + 1 {
            return Err(KernelError::Json(format!("expected {} values, got {}", 2 * doc.t + 1, doc.values.len())));
        }
        let gram = match doc.gram {
            None => None,
            Some(rows) => {
                let k = rows.len();
                let mut g = DMatrix::zeros(k, k);
                for (i, r) in rows.iter().enumerate() {
                    if r.len() != i + 1 {
                        return Err(KernelError::Json("gram must be a lower triangle".into()));
                    }
                    for (j, &v) in r.iter().enumerate() {
                        g[(i, j)] = v;
                        g[(j, i)] = v;
                    }
                }
                Some(g)
            }
        };
        Ok(Self {
            n: doc.n,
            d: doc.d,
            t: doc.t,
            values: doc.values,
            gram,
            basis: doc.basis.unwrap_or(GramBasis::Orthonormal),
            deficit: doc.deficit,
        })
    }
}

pub fn deficit_bound(n: usize, d: usize, t: usize) -> f64 {
    let (nf, df, tf) = (n as f64, d as f64, t as f64);
    nf * nf * df.powi(3) / (tf * tf)
}

fn upper_index(i: usize, j: usize) -> usize {
    j * (j + 1) / 2 + i
}

/// The synthesis SDP: variables are the upper triangle of the Gram matrix
/// `Q` (column by column) in the orthonormal Gegenbauer basis of degree `<= t`.
pub fn lambda_problem(n: usize, d: usize, t: usize) -> Result<ConicProblem, KernelError> {
    if n < 3 {
        return Err(KernelError::Ortho(crate::ortho::OrthoError::DimensionTooSmall(n)));
    }
    if d > 2 * t {
        return Err(KernelError::InvalidParameter(format!("degree d = {d} exceeds 2t = {}", 2 * t)));
    }
    let size = t + 1;
    let ops = expansion_operators(n, t, GramBasis::Orthonormal)?;
    let mut p = ConicProblem::new();
    for j in 0..size {
        for i in 0..=j {
            p.add_var(format!("Q[{i},{j}]"), 0.0);
        }
    }
    // lambda_k as a linear form on the upper-triangle variables
    let lambda_row = |k: usize| -> Vec<(usize, f64)> {
        let a = &ops[k];
        let mut row = Vec::new();
        for j in 0..size {
            for i in 0..=j {
                let c = if i == j { a[(i, i)] } else { a[(i, j)] + a[(j, i)] };
                if c.abs() > 1e-15 {
                    row.push((upper_index(i, j), c));
                }
            }
        }
        row
    };
    p.add_equality(lambda_row(0), 1.0);
    p.offset = d as f64;
    for k in 1..=d {
        let row = lambda_row(k);
        for &(v, c) in &row {
            p.objective[v] -= c;
        }
        let mut lower = PsdBlock::new(1);
        lower.add_constant(0, 0, -0.5);
        let mut upper = PsdBlock::new(1);
        upper.add_constant(0, 0, 1.0);
        for &(v, c) in &row {
            lower.add(v, 0, 0, c);
            upper.add(v, 0, 0, -c);
        }
        p.add_block(lower);
        p.add_block(upper);
    }
    let mut gram_block = PsdBlock::new(size);
    for j in 0..size {
        for i in 0..=j {
            gram_block.add(upper_index(i, j), i, j, 1.0);
        }
    }
    p.add_block(gram_block);
    Ok(p)
}

/// Minimizes `sum_{k=1}^d (1 - lambda_k)` over univariate sums of squares
/// `sigma = sum_k lambda_k G_k` of degree `2t` for the sphere in `R^n`,
/// subject to `lambda_0 = 1` and `1/2 <= lambda_k <= 1` for `1 <= k <= d`.
pub fn synthesize_lambda(n: usize, d: usize, t: usize, backend: &dyn ConicBackend) -> Result<LambdaVector, KernelError> {
    let problem = lambda_problem(n, d, t)?;
    let size = t + 1;
    if d == 0 {
        let mut q = DMatrix::zeros(size, size);
        q[(0, 0)] = 1.0;
        let values = gram_coefficients(n, &q, GramBasis::Orthonormal)?;
        return Ok(LambdaVector { n, d, t, values, gram: Some(q), basis: GramBasis::Orthonormal, deficit: 0.0 });
    }
    let sol = conic::solve(&problem, backend)?;
    match sol.status {
        conic::SolverStatus::Infeasible => return Err(KernelError::OrderTooSmall { n, d, t }),
        s if !s.has_solution() => return Err(KernelError::Solver(format!("{s}: {}", sol.message))),
        _ => {}
    }
    let q = DMatrix::from_fn(size, size, |i, j| sol.y[upper_index(i.min(j), i.max(j))]);
    let values = gram_coefficients(n, &q, GramBasis::Orthonormal)?;
    let deficit = (1..=d).map(|k| 1.0 - values[k]).sum();
    Ok(LambdaVector { n, d, t, values, gram: Some(q), basis: GramBasis::Orthonormal, deficit })
}
