use nalgebra::{DMatrix, SymmetricEigen};

use super::gegenbauer::{check_dim, gegenbauer_all};
use super::OrthoError;

/// Nodes and weights of a Gauss rule on `[-1, 1]`, weights summing to one.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `points`-node Gauss rule for the normalized weight `(1 - x^2)^{(n-3)/2}`,
/// exact up to degree `2 * points - 1`.
pub fn gauss_gegenbauer(n: usize, points: usize) -> Result<GaussRule, OrthoError> {
    check_dim(n)?;
    if points == 0 {
        return Ok(GaussRule { nodes: vec![], weights: vec![] });
    }
    let lam = (n as f64 - 2.0) / 2.0;
    let mut jac = DMatrix::<f64>::zeros(points, points);
    for k in 1..points {
        let kf = k as f64;
        let b = (kf * (kf + 2.0 * lam - 1.0) / (4.0 * (kf + lam) * (kf + lam - 1.0))).sqrt();
        jac[(k, k - 1)] = b;
        jac[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..points)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    })
}

/// Gauss-Legendre nodes for the uniform probability measure on `[-1, 1]`.
pub fn gauss_legendre(points: usize) -> GaussRule {
    gauss_gegenbauer(3, points).expect("n = 3 is valid")
}

/// Product cubature on `S^2` (uniform probability measure), exact for
/// polynomials of total degree `<= degree`.
pub fn s2_product_rule(degree: usize) -> Vec<([f64; 3], f64)> {
    let rule = gauss_legendre(degree / 2 + 1);
    let nphi = degree + 1;
    let mut out = Vec::with_capacity(rule.nodes.len() * nphi);
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let r = (1.0 - z * z).max(0.0).sqrt();
        for j in 0..nphi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / nphi as f64;
            out.push(([r * phi.cos(), r * phi.sin(), z], w / nphi as f64));
        }
    }
    out
}

/// Basis for the Gram matrix of a univariate sum-of-squares `s(x) = v(x)^T Q v(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GramBasis {
    /// `v = (1, x, ..., x^d)`.
    Monomial,
    /// `v_i = G_i / sqrt(G_i(1))`, orthonormal for the zonal weight.
    Orthonormal,
}

fn basis_values(n: usize, d: usize, basis: GramBasis, x: f64) -> Vec<f64> {
    match basis {
        GramBasis::Monomial => (0..=d).map(|i| x.powi(i as i32)).collect(),
        GramBasis::Orthonormal => {
            let g = gegenbauer_all(n, d, x).expect("dimension checked");
            let one = gegenbauer_all(n, d, 1.0).expect("dimension checked");
            g.iter().zip(&one).map(|(v, o)| v / o.sqrt()).collect()
        }
    }
}

/// Linear maps `A_0, ..., A_{2d}` with `<A_k, Q>` equal to the `k`-th
/// Gegenbauer coefficient of `v(x)^T Q v(x)` for the family of `R^n`.
pub fn expansion_operators(n: usize, d: usize, basis: GramBasis) -> Result<Vec<DMatrix<f64>>, OrthoError> {
    check_dim(n)?;
    let kmax = 2 * d;
    let rule = gauss_gegenbauer(n, 2 * d + 2)?;
    let mut ops = vec![DMatrix::<f64>::zeros(d + 1, d + 1); kmax + 1];
    let mut norms = vec![0.0; kmax + 1];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = basis_values(n, d, basis, x);
        let g = gegenbauer_all(n, kmax, x)?;
        for k in 0..=kmax {
            norms[k] += w * g[k] * g[k];
            let s = w * g[k];
            for i in 0..=d {
                for j in 0..=d {
                    ops[k][(i, j)] += s * v[i] * v[j];
                }
            }
        }
    }
    for (op, nk) in ops.iter_mut().zip(&norms) {
        *op /= *nk;
    }
    Ok(ops)
}

/// Gegenbauer coefficients `lambda_0, ..., lambda_{2d}` of `v(x)^T Q v(x)`.
pub fn gram_coefficients(n: usize, gram: &DMatrix<f64>, basis: GramBasis) -> Result<Vec<f64>, OrthoError> {
    if gram.nrows() != gram.ncols() || gram.nrows() == 0 {
        return Err(OrthoError::NotSquare(gram.nrows(), gram.ncols()));
    }
    let scale = gram.amax().max(1.0);
    if (gram - gram.transpose()).amax() > 1e-9 * scale {
        return Err(OrthoError::NotSymmetric);
    }
    let min_eig = SymmetricEigen::new(gram.clone()).eigenvalues.min();
    if min_eig < -1e-8 * scale {
        return Err(OrthoError::NotPsd(min_eig));
    }
    let ops = expansion_operators(n, gram.nrows() - 1, basis)?;
    Ok(ops.iter().map(|a| a.dot(gram)).collect())
}
