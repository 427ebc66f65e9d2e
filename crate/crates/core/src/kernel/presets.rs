//! Parameter presets of sets whose kernel operators satisfy the combination
//! theorem, and the rate combiner for products of two such sets.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{constants, KernelError};
use crate::poly::binomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetKind {
    Sphere,
    Hypercube,
    Ball,
    Simplex,
}

/// Data a factor set contributes to the product rate.
pub trait SetPreset: Send + Sync {
    fn kind(&self) -> PresetKind;
    /// Number of grading indices `m_i`.
    fn grading_arity(&self, n: usize) -> usize;
    /// Order `t_i` from which the eigenvalue bounds hold.
    fn threshold(&self, n: usize, d: usize) -> f64;
    /// Certificate degree `d_i(t)` of the kernel sections.
    fn certificate_degree(&self, n: usize, t: usize) -> usize;
    /// Eigenvalue deficit bound `eta_i(t)`.
    fn eta(&self, n: usize, d: usize, t: usize) -> f64;
    /// Reference measure, as text.
    fn measure(&self) -> &'static str;
    /// Provable harmonic-constant bound, when one is implemented.
    fn gamma_bound(&self, _n: usize, _d: usize) -> Option<f64> {
        None
    }
    /// Whether the kernel operator itself is implemented.
    fn operational(&self) -> bool {
        false
    }
}

fn sphere_eta(n: usize, d: usize, t: usize) -> f64 {
    let (nf, df, tf) = (n as f64, d as f64, t as f64);
    nf * nf * df.powi(3) / (tf * tf)
}

fn sphere_threshold(n: usize, d: usize) -> f64 {
    2.0 * n as f64 * d as f64 * (d as f64).sqrt()
}

pub struct SpherePreset;
pub struct HypercubePreset;
pub struct BallPreset;
pub struct SimplexPreset;

impl SetPreset for SpherePreset {
    fn kind(&self) -> PresetKind {
        PresetKind::Sphere
    }
    fn grading_arity(&self, _n: usize) -> usize {
        1
    }
    fn threshold(&self, n: usize, d: usize) -> f64 {
        sphere_threshold(n, d)
    }
    fn certificate_degree(&self, _n: usize, t: usize) -> usize {
        2 * t
    }
    fn eta(&self, n: usize, d: usize, t: usize) -> f64 {
        sphere_eta(n, d, t)
    }
    fn measure(&self) -> &'static str {
        "uniform Haar measure on the unit sphere"
    }
    fn gamma_bound(&self, n: usize, d: usize) -> Option<f64> {
        constants::gamma_bound(n, d).ok()
    }
    fn operational(&self) -> bool {
        true
    }
}

impl SetPreset for HypercubePreset {
    fn kind(&self) -> PresetKind {
        PresetKind::Hypercube
    }
    fn grading_arity(&self, n: usize) -> usize {
        n
    }
    fn threshold(&self, n: usize, d: usize) -> f64 {
        PI * d as f64 * (2.0 * n as f64).sqrt()
    }
    fn certificate_degree(&self, n: usize, t: usize) -> usize {
        n * (t + 1)
    }
    fn eta(&self, n: usize, d: usize, t: usize) -> f64 {
        let (nf, df, tf) = (n as f64, d as f64, t as f64);
        nf * PI * PI * df * df / (tf * tf)
    }
    fn measure(&self) -> &'static str {
        "normalized Chebyshev measure, density prod_j 1/(pi sqrt(1 - x_j^2))"
    }
}

impl SetPreset for BallPreset {
    fn kind(&self) -> PresetKind {
        PresetKind::Ball
    }
    fn grading_arity(&self, _n: usize) -> usize {
        1
    }
    fn threshold(&self, n: usize, d: usize) -> f64 {
        sphere_threshold(n, d)
    }
    fn certificate_degree(&self, _n: usize, t: usize) -> usize {
        2 * t
    }
    fn eta(&self, n: usize, d: usize, t: usize) -> f64 {
        sphere_eta(n, d, t)
    }
    fn measure(&self) -> &'static str {
        "density c_n (1 - |x|^2)^(-1/2) on the unit ball"
    }
}

impl SetPreset for SimplexPreset {
    fn kind(&self) -> PresetKind {
        PresetKind::Simplex
    }
    fn grading_arity(&self, _n: usize) -> usize {
        1
    }
    fn threshold(&self, n: usize, d: usize) -> f64 {
        sphere_threshold(n, d)
    }
    fn certificate_degree(&self, _n: usize, t: usize) -> usize {
        2 * t
    }
    fn eta(&self, n: usize, d: usize, t: usize) -> f64 {
        sphere_eta(n, d, t)
    }
    fn measure(&self) -> &'static str {
        "density c_n prod_j x_j^(-1/2) (1 - sum_j x_j)^(-1/2) on the standard simplex"
    }
}

/// Presets by kind.
pub struct PresetRegistry {
    presets: BTreeMap<PresetKind, Box<dyn SetPreset>>,
}

impl Default for PresetRegistry {
    fn default() -> Self {
        let mut presets: BTreeMap<PresetKind, Box<dyn SetPreset>> = BTreeMap::new();
        presets.insert(PresetKind::Sphere, Box::new(SpherePreset));
        presets.insert(PresetKind::Hypercube, Box::new(HypercubePreset));
        presets.insert(PresetKind::Ball, Box::new(BallPreset));
        presets.insert(PresetKind::Simplex, Box::new(SimplexPreset));
        Self { presets }
    }
}

impl PresetRegistry {
    pub fn get(&self, kind: PresetKind) -> &dyn SetPreset {
        self.presets[&kind].as_ref()
    }

    pub fn register(&mut self, preset: Box<dyn SetPreset>) {
        self.presets.insert(preset.kind(), preset);
    }

    pub fn kinds(&self) -> Vec<PresetKind> {
        self.presets.keys().copied().collect()
    }
}

/// Serializable summary of a preset at given `(n, d)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PresetSummary {
    pub kind: PresetKind,
    pub n: usize,
    pub d: usize,
    pub grading_arity: usize,
    pub threshold: f64,
    pub measure: String,
    pub operational: bool,
}

pub fn summarize(p: &dyn SetPreset, n: usize, d: usize) -> PresetSummary {
    PresetSummary {
        kind: p.kind(),
        n,
        d,
        grading_arity: p.grading_arity(n),
        threshold: p.threshold(n, d),
        measure: p.measure().to_string(),
        operational: p.operational(),
    }
}

/// One factor of a product set.
#[derive(Clone, Copy)]
pub struct Factor<'a> {
    pub preset: &'a dyn SetPreset,
    pub n: usize,
    /// Overrides the preset's harmonic-constant bound.
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateQuery {
    Bisphere { n: usize, d: usize },
    Multisphere { n: usize, d: usize, m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RateValue {
    pub value: f64,
    /// Degree of the certificates the bound refers to (product rule only).
    pub certificate_degree: Option<usize>,
}

pub fn rate_constant(q: RateQuery) -> Result<RateValue, KernelError> {
    let value = match q {
        RateQuery::Bisphere { n, d } => constants::c_bisphere(n, d)?,
        RateQuery::Multisphere { n, d, m } => constants::c_multisphere(n, d, m)?,
    };
    Ok(RateValue { value, certificate_degree: None })
}

/// `8 eta(t) C(m+d, d) gamma_1 gamma_2` for `X_1 x X_2`, with `m = m_1 + m_2`
/// and `eta = max(eta_1, eta_2)`. Multiplied by `q_max - q_min`, this bounds
/// the gap at certificate degree `d_1(t) + d_2(t)`.
pub fn general_rate(first: Factor<'_>, second: Factor<'_>, d: usize, t: usize) -> Result<RateValue, KernelError> {
    let mut gammas = [0.0; 2];
    for (i, f) in [first, second].iter().enumerate() {
        let th = f.preset.threshold(f.n, d);
        if (t as f64) < th {
            return Err(KernelError::BelowThreshold { t, threshold: th });
        }
        gammas[i] = f.gamma.or_else(|| f.preset.gamma_bound(f.n, d)).ok_or(KernelError::GammaRequired(f.preset.kind()))?;
    }
    let m = first.preset.grading_arity(first.n) + second.preset.grading_arity(second.n);
    let eta = first.preset.eta(first.n, d, t).max(second.preset.eta(second.n, d, t));
    let value = 8.0 * eta * binomial((m + d) as u64, d as u64) as f64 * gammas[0] * gammas[1];
    Ok(RateValue {
        value,
        certificate_degree: Some(first.preset.certificate_degree(first.n, t) + second.preset.certificate_degree(second.n, t)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_thresholds() {
        let reg = PresetRegistry::default();
        let s = reg.get(PresetKind::Sphere);
        assert!((s.threshold(3, 2) - 12.0 * 2f64.sqrt()).abs() < 1e-12);
        let f = Factor { preset: s, n: 3, gamma: None };
        assert!(matches!(general_rate(f, f, 2, 16), Err(KernelError::BelowThreshold { .. })));
        let r = general_rate(f, f, 2, 17).unwrap();
        assert_eq!(r.certificate_degree, Some(68));
        let eta = 72.0 / 289.0;
        assert!((r.value - 8.0 * eta * 6.0 * 5.0).abs() < 1e-12);
    }

    #[test]
    fn cube_needs_gamma() {
        let reg = PresetRegistry::default();
        let c = Factor { preset: reg.get(PresetKind::Hypercube), n: 2, gamma: None };
        let s = Factor { preset: reg.get(PresetKind::Sphere), n: 3, gamma: None };
        assert!(matches!(general_rate(c, s, 2, 100), Err(KernelError::GammaRequired(PresetKind::Hypercube))));
        let c = Factor { gamma: Some(1.5), ..c };
        let r = general_rate(c, s, 2, 100).unwrap();
        assert_eq!(r.certificate_degree, Some(2 * 101 + 200));
    }

    #[test]
    fn data_only_presets() {
        let reg = PresetRegistry::default();
        assert!(!reg.get(PresetKind::Ball).operational());
        assert!(!reg.get(PresetKind::Simplex).operational());
        assert_eq!(reg.kinds().len(), 4);
    }
}
