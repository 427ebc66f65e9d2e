//! The diagonal kernel operator on sphere products and its checks.

use super::{constants, KernelError, LambdaVector};
use crate::harmonic::multigrade_decompose;
use crate::oracle::{range_estimate, OracleBudget};
use crate::ortho::gegenbauer_all;
use crate::poly::{sup_norm_estimate, RealPoly};
use crate::set::SetDescriptor;

const ON_SPHERE_TOL: f64 = 1e-9;

fn check_unit(x: &[f64]) -> Result<(), KernelError> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > ON_SPHERE_TOL {
        return Err(KernelError::OffSphere(norm));
    }
    Ok(())
}

/// `sum_{k <= 2t} lambda_k G_k(x . x2)` on the unit sphere in `R^n`.
pub fn cd_kernel_eval(n: usize, t: usize, x: &[f64], x2: &[f64], lambda: &LambdaVector) -> Result<f64, KernelError> {
    if x.len() != n || x2.len() != n {
        return Err(KernelError::InvalidParameter(format!("points must have {n} coordinates")));
    }
    if lambda.n != n || lambda.t != t {
        return Err(KernelError::InvalidParameter(format!(
            "eigenvalues are for (n, t) = ({}, {}), not ({n}, {t})",
            lambda.n, lambda.t
        )));
    }
    check_unit(x)?;
    check_unit(x2)?;
    let dot: f64 = x.iter().zip(x2).map(|(a, b)| a * b).sum();
    let g = gegenbauer_all(n, 2 * t, dot.clamp(-1.0, 1.0))?;
    Ok(g.iter().enumerate().map(|(k, gk)| lambda.eigenvalue(k) * gk).sum())
}

/// `sum_kappa (prod_i lambda^(i)_{kappa_i})^{+-1} q_kappa`, one eigenvalue
/// sequence per variable block of `q`.
pub fn apply_operator(q: &RealPoly, lambdas: &[LambdaVector], invert: bool) -> Result<RealPoly, KernelError> {
    let layout = q.layout().clone();
    if lambdas.len() != layout.num_blocks() {
        return Err(KernelError::InvalidParameter(format!(
            "{} eigenvalue sequences for {} blocks",
            lambdas.len(),
            layout.num_blocks()
        )));
    }
    let dec = multigrade_decompose(q, &layout)?;
    let mut out = RealPoly::zero(&layout);
    for (kappa, comp) in &dec.components {
        let prod: f64 = kappa.iter().zip(lambdas).map(|(&k, l)| l.eigenvalue(k)).product();
        let factor = if invert {
            if prod == 0.0 {
                return Err(KernelError::ZeroEigenvalue(kappa.clone()));
            }
            1.0 / prod
        } else {
            prod
        };
        out = &out + &comp.scale(factor);
    }
    Ok(out)
}

/// Empirical and theoretical size of `K^{-1} q - q` after normalizing `q`
/// to the range `[0, 1]` on the set.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct P3Report {
    pub epsilon_empirical: f64,
    pub epsilon_theoretical: f64,
    /// Oracle estimates used for the normalization `(q - q_min) / (q_max - q_min)`.
    pub q_min: f64,
    pub q_max: f64,
    pub holds: bool,
}

/// Theoretical value: the bi-sphere constant for two blocks, the
/// multi-sphere constant otherwise, divided by `t^2` of the eigenvalues.
pub fn p3_report(q: &RealPoly, lambdas: &[LambdaVector], set: &SetDescriptor, samples: usize, seed: u64) -> Result<P3Report, KernelError> {
    let SetDescriptor::SphereProduct { m, n } = *set else {
        return Err(KernelError::NotOperational(set.to_string()));
    };
    set.check_layout(q.layout()).map_err(|e| KernelError::InvalidParameter(e.to_string()))?;
    let t = lambdas.first().map(|l| l.t).unwrap_or(0);
    if t == 0 || lambdas.iter().any(|l| l.t != t) {
        return Err(KernelError::InvalidParameter("eigenvalue sequences need a common order t >= 1".into()));
    }
    let d = q.degree();
    let (lo, hi) = range_estimate(q, set, OracleBudget::default(), seed)?;
    let (q_min, q_max) = (lo.min_estimate, hi.min_estimate);
    let width = q_max - q_min;
    let qn = if width > 0.0 {
        (q - &RealPoly::constant(q.layout(), q_min)).scale(1.0 / width)
    } else {
        RealPoly::zero(q.layout())
    };
    let diff = &apply_operator(&qn, lambdas, true)? - &qn;
    let epsilon_empirical = if diff.is_zero() { 0.0 } else { sup_norm_estimate(&diff, set, samples, seed)?.value };
    let c = if m == 2 { constants::c_bisphere(n, d)? } else { constants::c_multisphere(n, d, m)? };
    let epsilon_theoretical = c / (t as f64 * t as f64);
    Ok(P3Report { epsilon_empirical, epsilon_theoretical, q_min, q_max, holds: epsilon_empirical <= epsilon_theoretical })
}

/// `sum_{1 <= k+s <= d} (1/(lambda_k lambda_s) - 1)`.
pub fn bernoulli_chain_sum(lambda: &LambdaVector, d: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..=d {
        for s in 0..=d - k {
            if k + s >= 1 {
                acc += 1.0 / (lambda.eigenvalue(k) * lambda.eigenvalue(s)) - 1.0;
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{random_poly, Monomial, VariableLayout};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inner(n: usize) -> RealPoly {
        let l = VariableLayout::bipartite(n);
        RealPoly::from_terms(
            &l,
            (0..n).map(|i| {
                let mut e = vec![0u16; 2 * n];
                e[i] = 1;
                e[n + i] = 1;
                (Monomial::from_exponents(e), 1.0)
            }),
        )
        .unwrap()
    }

    fn lam(values: Vec<f64>) -> LambdaVector {
        let t = (values.len() - 1) / 2;
        LambdaVector { n: 3, d: 2, t, values, gram: None, basis: crate::ortho::GramBasis::Orthonormal, deficit: 0.0 }
    }

    #[test]
    fn kernel_values() {
        let u = LambdaVector::unit(3, 2);
        let x = [0.0, 0.6, 0.8];
        assert!((cd_kernel_eval(3, 2, &x, &x, &u).unwrap() - 25.0).abs() < 1e-10);
        assert_eq!(cd_kernel_eval(3, 0, &x, &[1.0, 0.0, 0.0], &LambdaVector::unit(3, 0)).unwrap(), 1.0);
        assert!(matches!(cd_kernel_eval(3, 2, &[1.0, 1.0, 0.0], &x, &u), Err(KernelError::OffSphere(_))));
    }

    #[test]
    fn diagonal_scaling_of_inner_product() {
        let q = inner(3);
        let l = lam(vec![1.0, 0.9, 0.8, 0.7, 0.6]);
        let out = apply_operator(&q, &[l.clone(), l], false).unwrap();
        assert!((&out - &q.scale(0.81)).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn constant_is_fixed_and_inverse_round_trips() {
        let layout = VariableLayout::bipartite(3);
        let l = lam(vec![1.0, 0.9, 0.8, 0.7, 0.6]);
        let one = RealPoly::constant(&layout, 1.0);
        assert_eq!(apply_operator(&one, &[l.clone(), l.clone()], false).unwrap(), one);
        let q = random_poly(&layout, 4, &mut ChaCha8Rng::seed_from_u64(2));
        let k = apply_operator(&q, &[l.clone(), l.clone()], false).unwrap();
        let back = apply_operator(&k, &[l.clone(), l], true).unwrap();
        let set = SetDescriptor::sphere_product(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut z = vec![0.0; 6];
        for _ in 0..50 {
            set.sample(&mut rng, &mut z);
            assert!((back.eval(&z) - q.eval(&z)).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_eigenvalue_blocks_inversion() {
        let q = inner(3);
        let l = lam(vec![1.0, 0.0, 1.0]);
        assert!(matches!(apply_operator(&q, &[l.clone(), l], true), Err(KernelError::ZeroEigenvalue(_))));
    }

    #[test]
    fn p3_closed_form_for_inner_product() {
        let q = inner(3);
        let l = lam(vec![1.0, 0.95, 0.9, 0.8, 0.7]);
        let set = SetDescriptor::sphere_product(2, 3).unwrap();
        let r = p3_report(&q, &[l.clone(), l], &set, 500, 1).unwrap();
        let want = (1.0 / (0.95f64 * 0.95) - 1.0) / 2.0;
        assert!((r.epsilon_empirical - want).abs() < 1e-8, "{r:?}");
        assert!((r.epsilon_theoretical - 17280.0 / 4.0).abs() < 1e-9);
        assert!(r.holds);
    }
}
