use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::QwassError;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;
/// Violations up to this size are repaired by projection instead of rejected.
pub const PROJECTION_TOL: f64 = 1e-8;

/// One failed density-matrix invariant with its magnitude.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "invariant", content = "magnitude", rename_all = "snake_case")]
pub enum Violation {
    /// `max |M - M*|`.
    NotHermitian(f64),
    /// `|tr M - 1|`.
    Trace(f64),
    /// Minus the smallest eigenvalue.
    NotPsd(f64),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NotHermitian(v) => write!(f, "not Hermitian (max |M - M*| = {v:.3e})"),
            Violation::Trace(v) => write!(f, "trace off by {v:.3e}"),
            Violation::NotPsd(v) => write!(f, "negative eigenvalue {:.3e}", -v),
        }
    }
}

/// A density matrix: Hermitian, PSD, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    matrix: DMatrix<Complex64>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct StateDoc {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()).scale(0.5)
}

fn violations(m: &DMatrix<Complex64>) -> Vec<Violation> {
    let mut out = Vec::new();
    let h = hermitian_defect(m);
    if h > HERMITIAN_TOL {
        out.push(Violation::NotHermitian(h));
    }
    let tr = (m.trace().re - 1.0).abs().max(m.trace().im.abs());
    if tr > TRACE_TOL {
        out.push(Violation::Trace(tr));
    }
    let min = SymmetricEigen::new(hermitize(m)).eigenvalues.min();
    if min < -PSD_TOL {
        out.push(Violation::NotPsd(-min));
    }
    out
}

fn magnitude(v: &Violation) -> f64 {
    match *v {
        Violation::NotHermitian(x) | Violation::Trace(x) | Violation::NotPsd(x) => x,
    }
}

/// Validates a density matrix. Violations no larger than [`PROJECTION_TOL`]
/// are repaired: Hermitize, normalize the trace, clip negative eigenvalues,
/// normalize again.
pub fn validate_state(m: &DMatrix<Complex64>) -> Result<QuantumState, QwassError> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(QwassError::NotSquare(m.nrows(), m.ncols()));
    }
    let found = violations(m);
    if found.is_empty() {
        return Ok(QuantumState { matrix: m.clone() });
    }
    if found.iter().any(|v| magnitude(v) > PROJECTION_TOL) {
        return Err(QwassError::InvalidState(found));
    }
    log::info!("projecting state onto density matrices: {}", found.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "));
    let h = hermitize(m);
    let h = h.unscale(h.trace().re);
    let eig = SymmetricEigen::new(h);
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let total: f64 = clipped.sum();
    let d = DMatrix::from_diagonal(&clipped.map(|l| Complex64::new(l / total, 0.0)));
    let p = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
    Ok(QuantumState { matrix: hermitize(&p) })
}

impl QuantumState {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `I / n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self { matrix: DMatrix::identity(n, n).unscale(n as f64) }
    }

    /// `u u*` for a nonzero vector `u` (normalized first).
    pub fn pure(u: &[Complex64]) -> Result<Self, QwassError> {
        let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(QwassError::InvalidPlan("zero vector".into()));
        }
        let v = nalgebra::DVector::from_iterator(u.len(), u.iter().map(|z| z / norm));
        Ok(Self { matrix: &v * v.adjoint() })
    }

    /// Eigenpairs `(weight, unit vector)` with positive weight.
    pub fn spectral(&self) -> Vec<(f64, Vec<Complex64>)> {
        let eig = SymmetricEigen::new(self.matrix.clone());
        (0..self.dim())
            .filter(|&i| eig.eigenvalues[i] > 1e-14)
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.dim();
        let part = |f: fn(&Complex64) -> f64| (0..n).map(|i| (0..n).map(|j| f(&self.matrix[(i, j)])).collect()).collect();
        serde_json::to_value(StateDoc { n, re: part(|z| z.re), im: part(|z| z.im) }).expect("plain data")
    }

    /// Parses `{"n": .., "re": [[..]], "im": [[..]]}` and validates it.
    pub fn from_json_str(s: &str) -> Result<Self, QwassError> {
        let doc: StateDoc = serde_json::from_str(s).map_err(|e| QwassError::Json(e.to_string()))?;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == doc.n && rows.iter().all(|r| r.len() == doc.n);
        if !shape_ok(&doc.re) || !shape_ok(&doc.im) {
            return Err(QwassError::Json(format!("`re` and `im` must be {0}x{0}", doc.n)));
        }
        let m = DMatrix::from_fn(doc.n, doc.n, |i, j| Complex64::new(doc.re[i][j], doc.im[i][j]));
        validate_state(&m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn accepts_standard_states() {
        assert!(validate_state(QuantumState::maximally_mixed(3).matrix()).is_ok());
        let mut e = DMatrix::zeros(2, 2);
        e[(0, 0)] = c(1.0, 0.0);
        assert!(validate_state(&e).is_ok());
    }

    #[test]
    fn reports_each_violation() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.1, 0.0)]));
        match validate_state(&m) {
            Err(QwassError::InvalidState(v)) => {
                assert_eq!(v.len(), 1);
                assert!(matches!(v[0], Violation::Trace(x) if (x - 0.1).abs() < 1e-12));
            }
            other => panic!("{other:?}"),
        }
        let bad = DMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        let Err(QwassError::InvalidState(v)) = validate_state(&bad) else { panic!() };
        assert_eq!(v.len(), 2);
        assert!(matches!(validate_state(&DMatrix::zeros(2, 3)), Err(QwassError::NotSquare(2, 3))));
    }

    #[test]
    fn small_defects_are_projected() {
        let mut m = QuantumState::maximally_mixed(2).matrix().clone();
        m[(0, 1)] = c(1e-9, 0.0);
        m[(1, 1)] += c(3e-9, 0.0);
        let s = validate_state(&m).unwrap();
        assert!(violations(s.matrix()).is_empty());
    }

    #[test]
    fn json_round_trip() {
        let s = QuantumState::pure(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let back = QuantumState::from_json_str(&s.to_json().to_string()).unwrap();
        assert!((back.matrix() - s.matrix()).iter().all(|z| z.norm() < 1e-15));
        assert!(QuantumState::from_json_str(r#"{"n":2,"re":[[1]],"im":[[0]]}"#).is_err());
    }
}
