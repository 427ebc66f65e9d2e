use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{QuantumState, QwassError};

/// One atom `(weight, u, v)` of a transport plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

/// A finitely supported quantum transport plan.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    atoms: Vec<Atom>,
}

const PLAN_TOL: f64 = 1e-10;
const MARGINAL_TOL: f64 = 1e-8;

fn unit_defect(u: &[Complex64]) -> f64 {
    (u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs()
}

impl TransportPlan {
    /// Checks positive weights summing to one and unit vectors of a common length.
    pub fn new(atoms: Vec<Atom>) -> Result<Self, QwassError> {
        let n = atoms.first().ok_or_else(|| QwassError::InvalidPlan("no atoms".into()))?.u.len();
        for (i, a) in atoms.iter().enumerate() {
            if a.weight <= 0.0 {
                return Err(QwassError::InvalidPlan(format!("atom {i} has weight {}", a.weight)));
            }
            if a.u.len() != n || a.v.len() != n {
                return Err(QwassError::InvalidPlan(format!("atom {i} has the wrong dimension")));
            }
            if unit_defect(&a.u) > PLAN_TOL || unit_defect(&a.v) > PLAN_TOL {
                return Err(QwassError::InvalidPlan(format!("atom {i} has a non-unit vector")));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > PLAN_TOL {
            return Err(QwassError::InvalidPlan(format!("weights sum to {total}")));
        }
        Ok(Self { atoms })
    }

    /// Product of the spectral decompositions of the two states.
    pub fn product(rho: &QuantumState, nu: &QuantumState) -> Result<Self, QwassError> {
        let mut atoms = Vec::new();
        for (w1, u) in rho.spectral() {
            for (w2, v) in nu.spectral() {
                atoms.push(Atom { weight: w1 * w2, u: u.clone(), v });
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        atoms.iter_mut().for_each(|a| a.weight /= total);
        Self::new(atoms)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].u.len()
    }

    /// `(sum w u u*, sum w v v*)`.
    pub fn marginals(&self) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, n);
        for atom in &self.atoms {
            let u = DVector::from_column_slice(&atom.u);
            let v = DVector::from_column_slice(&atom.v);
            a += (&u * u.adjoint()).scale(atom.weight);
            b += (&v * v.adjoint()).scale(atom.weight);
        }
        (a, b)
    }

    /// Whether the marginals reproduce `rho` and `nu` within `1e-8`.
    pub fn couples(&self, rho: &QuantumState, nu: &QuantumState) -> bool {
        let (a, b) = self.marginals();
        let close = |x: &DMatrix<Complex64>, y: &DMatrix<Complex64>| {
            x.shape() == y.shape() && (x - y).iter().all(|z| z.norm() <= MARGINAL_TOL)
        };
        close(&a, rho.matrix()) && close(&b, nu.matrix())
    }
}

fn bilinear(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// `sum_l w_l (|u_l^T u_l|^2 + |v_l^T v_l|^2 - 2 |u_l^T v_l|^2)`.
pub fn transport_cost(plan: &TransportPlan) -> f64 {
    plan.atoms
        .iter()
        .map(|a| a.weight * (bilinear(&a.u, &a.u).norm_sqr() + bilinear(&a.v, &a.v).norm_sqr() - 2.0 * bilinear(&a.u, &a.v).norm_sqr()))
        .sum()
}
