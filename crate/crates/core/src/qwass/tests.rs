use num_complex::Complex64;

use super::*;
use crate::conic::{BackendConfig, ClarabelBackend};
use crate::moment::SphereEncoding;

fn real(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn backend() -> ClarabelBackend {
    ClarabelBackend::new(BackendConfig::default())
}

#[test]
fn moment_matrix_sizes() {
    let rho = QuantumState::maximally_mixed(2);
    let full = build_w2_relaxation_with(&rho, &rho, 2, SphereEncoding::Equalities).unwrap();
    assert_eq!(full.basis().len(), 45);
    let reduced = build_w2_relaxation(&rho, &rho, 2).unwrap();
    assert_eq!(reduced.basis().len(), 43);
    assert!(matches!(build_w2_relaxation(&rho, &rho, 1), Err(QwassError::OrderTooSmall(1))));
    let other = QuantumState::maximally_mixed(3);
    assert!(matches!(build_w2_relaxation(&rho, &other, 2), Err(QwassError::DimensionMismatch(2, 3))));
}

#[test]
fn identical_pure_states() {
    let rho = QuantumState::pure(&real(&[1.0, 0.0])).unwrap();
    let r = solve_w2(&rho, &rho, 2, &backend()).unwrap();
    // no strictly feasible moment sequence exists for a pure marginal
    assert!(r.status.has_solution(), "{r:?}");
    assert!(r.w2_squared_lower.abs() < 1e-6, "{r:?}");
    assert!((r.mass - 1.0).abs() < 1e-8);
    assert!(!r.certified);
}

#[test]
fn orthogonal_pure_states_bounded_by_plan() {
    let rho = QuantumState::pure(&real(&[1.0, 0.0])).unwrap();
    let nu = QuantumState::pure(&real(&[0.0, 1.0])).unwrap();
    let r = solve_w2(&rho, &nu, 2, &backend()).unwrap();
    assert!(r.w2_squared_lower <= 2.0 + 1e-6, "{r:?}");
    let swapped = solve_w2(&nu, &rho, 2, &backend()).unwrap();
    assert!((r.w2_squared_lower - swapped.w2_squared_lower).abs() < 1e-6);
}

#[test]
fn mixed_state_distance_is_clamped() {
    let rho = QuantumState::maximally_mixed(2);
    let r = solve_w2(&rho, &rho, 2, &backend()).unwrap();
    // the objective reaches -2 on atoms x = (1, i)/sqrt 2, y = conj(x)
    assert!(r.w2_squared_lower < -1.0, "{r:?}");
    assert_eq!(r.w2, 0.0);
    let plan = TransportPlan::product(&rho, &rho).unwrap();
    assert!(r.w2_squared_lower <= transport_cost(&plan) + 1e-6);
}

#[test]
fn result_json_fields() {
    let rho = QuantumState::pure(&real(&[1.0, 0.0])).unwrap();
    let r = solve_w2(&rho, &rho, 2, &backend()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
    keys.sort();
    assert_eq!(keys, ["certified", "kappa_over_t2", "status", "t", "w2", "w2_squared_lower"]);
}
