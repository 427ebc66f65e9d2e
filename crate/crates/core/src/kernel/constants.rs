//! Closed-form rate constants.

use super::KernelError;
use crate::ortho::harmonic_dimension;
use crate::poly::binomial;

fn checked(v: Option<u128>, what: &str) -> Result<u128, KernelError> {
    v.ok_or_else(|| KernelError::Overflow(what.to_string()))
}

/// `max_{k <= d} dim H_k(R^n)`, the square of the harmonic-constant bound.
pub fn gamma_squared_bound_exact(n: usize, d: usize) -> Result<u128, KernelError> {
    let mut m = 1;
    for k in 0..=d {
        m = m.max(harmonic_dimension(n, k)?);
    }
    Ok(m)
}

pub fn gamma_bound(n: usize, d: usize) -> Result<f64, KernelError> {
    Ok((gamma_squared_bound_exact(n, d)? as f64).sqrt())
}

/// `8 n^2 d^3 C(d+2, 2) gamma^2` with `gamma^2 = max_k dim H_k`.
pub fn c_bisphere_exact(n: usize, d: usize) -> Result<u128, KernelError> {
    let (nn, dd) = (n as u128, d as u128);
    let g2 = gamma_squared_bound_exact(n, d)?;
    let v = 8u128
        .checked_mul(nn * nn)
        .and_then(|v| v.checked_mul(dd * dd * dd))
        .and_then(|v| v.checked_mul(binomial(d as u64 + 2, 2)))
        .and_then(|v| v.checked_mul(g2));
    checked(v, "bi-sphere constant")
}

pub fn c_bisphere(n: usize, d: usize) -> Result<f64, KernelError> {
    Ok(c_bisphere_exact(n, d)? as f64)
}

/// `m 2^m n^2 d^3 C(d+m, m) gamma^m`.
pub fn c_multisphere(n: usize, d: usize, m: usize) -> Result<f64, KernelError> {
    if m == 0 {
        return Err(KernelError::InvalidParameter("m must be at least 1".into()));
    }
    let g = gamma_bound(n, d)?;
    let (nf, df, mf) = (n as f64, d as f64, m as f64);
    Ok(mf * 2f64.powi(m as i32) * nf * nf * df.powi(3) * binomial((d + m) as u64, m as u64) as f64 * g.powi(m as i32))
}

/// Exact value of [`c_multisphere`] when `m` is even (then `gamma^m` is an integer).
pub fn c_multisphere_exact(n: usize, d: usize, m: usize) -> Result<Option<u128>, KernelError> {
    if m == 0 {
        return Err(KernelError::InvalidParameter("m must be at least 1".into()));
    }
    if m % 2 == 1 {
        return Ok(None);
    }
    let (nn, dd) = (n as u128, d as u128);
    let g2 = gamma_squared_bound_exact(n, d)?;
    let v = (m as u128)
        .checked_mul(1u128.checked_shl(m as u32).unwrap_or(0))
        .and_then(|v| v.checked_mul(nn * nn))
        .and_then(|v| v.checked_mul(dd * dd * dd))
        .and_then(|v| v.checked_mul(binomial((d + m) as u64, m as u64)))
        .and_then(|v| v.checked_mul(g2.checked_pow((m / 2) as u32)?))
        .filter(|&v| v > 0);
    checked(v, "multi-sphere constant").map(Some)
}

/// Bound on `sum_{1 <= k+s <= d} (1/(lambda_k lambda_s) - 1)` implied by the
/// eigenvalue deficit bound: `8 (n^2 d^3 / t^2) C(d+2, 2)`.
pub fn bernoulli_chain_bound(n: usize, d: usize, t: usize) -> f64 {
    let (nf, df, tf) = (n as f64, d as f64, t as f64);
    8.0 * nf * nf * df.powi(3) / (tf * tf) * binomial(d as u64 + 2, 2) as f64
}
