//! Zonal Gegenbauer family of the unit sphere `S^{n-1}` in `R^n`.
//!
//! Members are orthogonal on `[-1, 1]` for the probability weight
//! proportional to `(1 - x^2)^{(n-3)/2}` (the law of `x . e` under the
//! uniform measure on `S^{n-1}`), scaled so that `G_k(1)` equals the dimension
//! of the degree-`k` spherical harmonics. With this scaling
//! `int G_j G_k w = delta_jk G_k(1)` and `sum_{k<=d} G_k(x . x')` is the
//! reproducing kernel of polynomials of degree `<= d` on the sphere.

use super::OrthoError;
use crate::poly::binomial;

pub(crate) fn check_dim(n: usize) -> Result<(), OrthoError> {
    if n < 3 {
        return Err(OrthoError::DimensionTooSmall(n));
    }
    Ok(())
}

/// `lambda = (n - 2) / 2`, the classical Gegenbauer parameter.
fn lambda(n: usize) -> f64 {
    (n as f64 - 2.0) / 2.0
}

/// All members `G_0(x), ..., G_kmax(x)`.
pub fn gegenbauer_all(n: usize, kmax: usize, x: f64) -> Result<Vec<f64>, OrthoError> {
    check_dim(n)?;
    let lam = lambda(n);
    let mut c = Vec::with_capacity(kmax + 1);
    c.push(1.0);
    if kmax >= 1 {
        c.push(2.0 * lam * x);
    }
    for k in 1..kmax {
        let kf = k as f64;
        let next = (2.0 * (kf + lam) * x * c[k] - (kf + 2.0 * lam - 1.0) * c[k - 1]) / (kf + 1.0);
        c.push(next);
    }
    Ok(c.into_iter().enumerate().map(|(k, v)| (k as f64 + lam) / lam * v).collect())
}

/// `G_k(x)` for the sphere in `R^n`.
pub fn gegenbauer_eval(n: usize, k: usize, x: f64) -> Result<f64, OrthoError> {
    Ok(gegenbauer_all(n, k, x)?[k])
}

/// `(1 + 2k/(n-2)) * C(k+n-3, k)`.
pub fn gegenbauer_value_at_one(n: usize, k: usize) -> Result<f64, OrthoError> {
    check_dim(n)?;
    let b = binomial((k + n - 3) as u64, k as u64) as f64;
    Ok((1.0 + 2.0 * k as f64 / (n as f64 - 2.0)) * b)
}

/// Dimension of degree-`k` spherical harmonics in `R^n`, exactly:
/// `C(k+n-1, n-1) - C(k+n-3, n-1)`.
pub fn harmonic_dimension(n: usize, k: usize) -> Result<u128, OrthoError> {
    if n < 2 {
        return Err(OrthoError::DimensionTooSmall(n));
    }
    let (n, k) = (n as u64, k as u64);
    let top = binomial(k + n - 1, n - 1);
    let low = if k >= 2 { binomial(k + n - 3, n - 1) } else { 0 };
    Ok(top - low)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_member() {
        for n in 3..7 {
            for x in [-1.0, -0.3, 0.0, 0.8] {
                assert_eq!(gegenbauer_eval(n, 0, x).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn values_at_one() {
        assert!((gegenbauer_eval(5, 2, 1.0).unwrap() - 14.0).abs() < 1e-12);
        for k in 0..10 {
            assert!((gegenbauer_eval(3, k, 1.0).unwrap() - (2 * k + 1) as f64).abs() < 1e-10);
        }
        assert_eq!(gegenbauer_value_at_one(4, 3).unwrap(), 16.0);
        assert_eq!(gegenbauer_value_at_one(7, 0).unwrap(), 1.0);
        assert_eq!(gegenbauer_value_at_one(3, 5).unwrap(), 11.0);
    }

    #[test]
    fn closed_form_agrees_with_exact_dimension() {
        for n in 3..9 {
            for k in 0..15 {
                let exact = harmonic_dimension(n, k).unwrap() as f64;
                let closed = gegenbauer_value_at_one(n, k).unwrap();
                assert!((exact - closed).abs() <= 1e-9 * exact, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn legendre_case() {
        // n = 3: G_k = (2k+1) P_k; P_2 = (3x^2 - 1)/2
        let x = 0.37;
        assert!((gegenbauer_eval(3, 2, x).unwrap() - 5.0 * (3.0 * x * x - 1.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn circle_rejected() {
        assert_eq!(gegenbauer_eval(2, 1, 0.5), Err(OrthoError::DimensionTooSmall(2)));
        assert!(gegenbauer_value_at_one(1, 0).is_err());
    }
}
