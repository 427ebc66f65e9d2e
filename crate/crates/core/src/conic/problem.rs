use nalgebra::DMatrix;

use super::ConicError;

/// One upper-triangle entry `(row, col)` of a symmetric matrix, `row <= col`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEntry {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl SymEntry {
    /// Orders the indices so that `row <= col`.
    pub fn new(a: usize, b: usize, value: f64) -> Self {
        Self { row: a.min(b), col: a.max(b), value }
    }
}

/// Affine symmetric matrix `F0 + sum_i y_i F_i` constrained to be PSD.
/// Blocks of size one are plain nonnegativity constraints.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PsdBlock {
    pub size: usize,
    pub constant: Vec<SymEntry>,
    /// `(variable, entry)` pairs; repeated entries are summed.
    pub linear: Vec<(usize, SymEntry)>,
}

impl PsdBlock {
    pub fn new(size: usize) -> Self {
        Self { size, constant: vec![], linear: vec![] }
    }

    /// `y_var * value` at `(a, b)` and `(b, a)`.
    pub fn add(&mut self, var: usize, a: usize, b: usize, value: f64) {
        self.linear.push((var, SymEntry::new(a, b, value)));
    }

    pub fn add_constant(&mut self, a: usize, b: usize, value: f64) {
        self.constant.push(SymEntry::new(a, b, value));
    }

    /// The constant term `F0` as a dense matrix.
    pub fn constant_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for e in &self.constant {
            m[(e.row, e.col)] += e.value;
            if e.row != e.col {
                m[(e.col, e.row)] += e.value;
            }
        }
        m
    }

    /// The matrix `F0 + sum_i y_i F_i`.
    pub fn evaluate(&self, y: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        let mut put = |e: &SymEntry, v: f64| {
            m[(e.row, e.col)] += v;
            if e.row != e.col {
                m[(e.col, e.row)] += v;
            }
        };
        for e in &self.constant {
            put(e, e.value);
        }
        for (var, e) in &self.linear {
            put(e, e.value * y[*var]);
        }
        m
    }

    /// `<F0, X>` for symmetric `X`.
    pub fn constant_inner(&self, x: &DMatrix<f64>) -> f64 {
        self.constant.iter().map(|e| sym_weight(e) * e.value * x[(e.row, e.col)]).sum()
    }

    /// Adds `<F_i, X>` into `out[i]`.
    pub fn adjoint_into(&self, x: &DMatrix<f64>, out: &mut [f64]) {
        for (var, e) in &self.linear {
            out[*var] += sym_weight(e) * e.value * x[(e.row, e.col)];
        }
    }
}

fn sym_weight(e: &SymEntry) -> f64 {
    if e.row == e.col {
        1.0
    } else {
        2.0
    }
}

/// Standard-form conic program over free variables `y`:
///
/// ```text
/// minimize    c^T y + offset
/// subject to  E y = g
///             F0_b + sum_i y_i F_{b,i}  PSD   for every block b
/// ```
///
/// Its conic dual reads `maximize g^T w - sum_b <F0_b, X_b> + offset` over
/// `X_b` PSD with `c = E^T w + sum_b A_b^*(X_b)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConicProblem {
    pub objective: Vec<f64>,
    pub offset: f64,
    /// Sparse equality rows `(variable, coefficient)`.
    pub eq_rows: Vec<Vec<(usize, f64)>>,
    pub eq_rhs: Vec<f64>,
    pub blocks: Vec<PsdBlock>,
    /// Human-readable name of each variable (a monomial for moment problems).
    pub labels: Vec<String>,
}

impl ConicProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_equalities(&self) -> usize {
        self.eq_rows.len()
    }

    pub fn add_var(&mut self, label: impl Into<String>, cost: f64) -> usize {
        self.objective.push(cost);
        self.labels.push(label.into());
        self.objective.len() - 1
    }

    pub fn add_equality(&mut self, row: Vec<(usize, f64)>, rhs: f64) {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn add_block(&mut self, block: PsdBlock) {
        self.blocks.push(block);
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size).collect()
    }

    pub fn validate(&self) -> Result<(), ConicError> {
        let n = self.num_vars();
        let bad = |msg: String| Err(ConicError::Malformed(msg));
        if self.labels.len() != n {
            return bad(format!("{} labels for {n} variables", self.labels.len()));
        }
        if self.eq_rows.len() != self.eq_rhs.len() {
            return bad("equality rows and right-hand sides differ in length".into());
        }
        if !self.offset.is_finite() || self.objective.iter().chain(&self.eq_rhs).any(|v| !v.is_finite()) {
            return bad("non-finite objective or right-hand side".into());
        }
        for (r, row) in self.eq_rows.iter().enumerate() {
            if row.iter().any(|&(v, c)| v >= n || !c.is_finite()) {
                return bad(format!("equality row {r} references an invalid variable or value"));
            }
        }
        for (b, block) in self.blocks.iter().enumerate() {
            if block.size == 0 {
                return bad(format!("block {b} has size 0"));
            }
            let entry_ok = |e: &SymEntry| e.row <= e.col && e.col < block.size && e.value.is_finite();
            if !block.constant.iter().all(entry_ok) || !block.linear.iter().all(|(v, e)| *v < n && entry_ok(e)) {
                return bad(format!("block {b} has an out-of-range entry"));
            }
        }
        Ok(())
    }

    pub fn primal_objective(&self, y: &[f64]) -> f64 {
        self.offset + self.objective.iter().zip(y).map(|(c, v)| c * v).sum::<f64>()
    }

    /// `g^T w - sum_b <F0_b, X_b> + offset`.
    pub fn dual_objective(&self, w: &[f64], x: &[DMatrix<f64>]) -> f64 {
        let lin: f64 = self.eq_rhs.iter().zip(w).map(|(g, v)| g * v).sum();
        let cone: f64 = self.blocks.iter().zip(x).map(|(b, xb)| b.constant_inner(xb)).sum();
        self.offset + lin - cone
    }

    /// `c - E^T w - sum_b A_b^*(X_b)`.
    pub fn dual_residual(&self, w: &[f64], x: &[DMatrix<f64>]) -> Vec<f64> {
        let mut r = vec![0.0; self.num_vars()];
        for (row, &wi) in self.eq_rows.iter().zip(w) {
            for &(v, c) in row {
                r[v] += c * wi;
            }
        }
        for (b, xb) in self.blocks.iter().zip(x) {
            b.adjoint_into(xb, &mut r);
        }
        self.objective.iter().zip(&r).map(|(c, a)| c - a).collect()
    }

    /// Largest violation of the equalities and the most negative block eigenvalue.
    pub fn primal_violation(&self, y: &[f64]) -> (f64, f64) {
        let eq = self
            .eq_rows
            .iter()
            .zip(&self.eq_rhs)
            .map(|(row, g)| (row.iter().map(|&(v, c)| c * y[v]).sum::<f64>() - g).abs())
            .fold(0.0, f64::max);
        let eig = self
            .blocks
            .iter()
            .map(|b| nalgebra::SymmetricEigen::new(b.evaluate(y)).eigenvalues.min())
            .fold(f64::INFINITY, f64::min);
        (eq, eig)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_evaluation_is_symmetric() {
        let mut b = PsdBlock::new(2);
        b.add_constant(0, 0, 1.0);
        b.add(0, 1, 0, 2.0);
        let m = b.evaluate(&[3.0]);
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 6.0, 6.0, 0.0]));
    }

    #[test]
    fn adjoint_matches_inner_product() {
        let mut b = PsdBlock::new(3);
        b.add(0, 0, 1, 1.5);
        b.add(1, 2, 2, -1.0);
        b.add(0, 1, 1, 0.5);
        let x = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 4.0]);
        let mut out = vec![0.0; 2];
        b.adjoint_into(&x, &mut out);
        for (i, e) in [[1.0, 0.0], [0.0, 1.0]].iter().enumerate() {
            let mut f = b.evaluate(e);
            f -= b.evaluate(&[0.0, 0.0]);
            assert!((f.dot(&x) - out[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn validation_catches_bad_indices() {
        let mut p = ConicProblem::new();
        let v = p.add_var("y0", 1.0);
        let mut b = PsdBlock::new(1);
        b.add(v, 0, 1, 1.0);
        p.add_block(b);
        assert!(p.validate().is_err());
    }
}
