use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sphere_sos::conic::{self, read_problem, write_problem, BackendConfig, BackendRegistry, ConicBackend};
use sphere_sos::kernel::{apply_operator, synthesize_lambda};
use sphere_sos::moment::{self, build_relaxation, build_relaxation_with, hierarchy_sweep, SphereEncoding, SweepOptions};
use sphere_sos::oracle::{self, grid_minimize, OracleBudget};
use sphere_sos::poly::random_poly;
use sphere_sos::qwass::{solve_w2, QuantumState};
use sphere_sos::SetDescriptor;

fn backend(name: &str) -> Box<dyn ConicBackend> {
    BackendRegistry::default().create(name, BackendConfig::default()).unwrap()
}

#[test]
fn exported_problem_solves_to_the_same_value() {
    let set = SetDescriptor::SphereProduct { m: 2, n: 2 };
    let q = random_poly(&set.layout(), 2, &mut ChaCha8Rng::seed_from_u64(3));
    let p = build_relaxation(&q, &set, 1).unwrap();
    let back = read_problem(&write_problem(&p.conic)).unwrap();
    let b = backend("dense-ipm");
    let direct = conic::solve(&p.conic, b.as_ref()).unwrap();
    let again = conic::solve(&back, b.as_ref()).unwrap();
    assert!((direct.lower_bound() - again.lower_bound()).abs() < 1e-9);
}

#[test]
fn backends_agree() {
    let set = SetDescriptor::SphereProduct { m: 2, n: 3 };
    let q = random_poly(&set.layout(), 2, &mut ChaCha8Rng::seed_from_u64(8));
    let p = build_relaxation(&q, &set, 2).unwrap();
    let a = moment::solve(&p, backend("dense-ipm").as_ref()).unwrap();
    let b = moment::solve(&p, backend("clarabel").as_ref()).unwrap();
    assert!(a.status.has_solution() && b.status.has_solution());
    assert!((a.lower_bound - b.lower_bound).abs() < 1e-5, "{} vs {}", a.lower_bound, b.lower_bound);
}

#[test]
fn encodings_agree() {
    let set = SetDescriptor::SphereProduct { m: 2, n: 2 };
    let q = random_poly(&set.layout(), 3, &mut ChaCha8Rng::seed_from_u64(21));
    let b = backend("dense-ipm");
    let r = moment::solve(&build_relaxation_with(&q, &set, 2, SphereEncoding::Reduced).unwrap(), b.as_ref()).unwrap();
    let e = moment::solve(&build_relaxation_with(&q, &set, 2, SphereEncoding::Equalities).unwrap(), b.as_ref()).unwrap();
    assert!((r.lower_bound - e.lower_bound).abs() < 1e-5, "{} vs {}", r.lower_bound, e.lower_bound);
}

#[test]
fn sweep_bounds_stay_below_the_oracle() {
    let set = SetDescriptor::SphereProduct { m: 2, n: 2 };
    let q = random_poly(&set.layout(), 4, &mut ChaCha8Rng::seed_from_u64(5));
    let sweep = hierarchy_sweep(&q, &set, &[2, 3], backend("dense-ipm").as_ref(), &SweepOptions::default()).unwrap();
    for row in &sweep.rows {
        assert!(row.gap >= -1e-5, "t = {}: gap {}", row.t, row.gap);
        assert!(row.theory_bound > 0.0);
    }
    assert!(sweep.rows[1].lower_bound >= sweep.rows[0].lower_bound - 1e-6);
    assert!(sweep.q_min <= sweep.q_max);
}

#[test]
fn distance_is_symmetric() {
    let r = QuantumState::pure(&[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
    let n = QuantumState::maximally_mixed(2);
    let b = backend("dense-ipm");
    let ab = solve_w2(&r, &n, 2, b.as_ref()).unwrap();
    let ba = solve_w2(&n, &r, 2, b.as_ref()).unwrap();
    assert!((ab.w2_squared_lower - ba.w2_squared_lower).abs() < 1e-5, "{ab:?} {ba:?}");
    assert!(ab.w2_squared_lower <= 2.0 + 1e-6);
}

#[test]
fn synthesized_operator_inverts() {
    let set = SetDescriptor::SphereProduct { m: 2, n: 3 };
    let q = random_poly(&set.layout(), 2, &mut ChaCha8Rng::seed_from_u64(13));
    let lam = synthesize_lambda(3, 2, 6, backend("dense-ipm").as_ref()).unwrap();
    let lambdas = [lam.clone(), lam];
    let there = apply_operator(&q, &lambdas, false).unwrap();
    let back = apply_operator(&there, &lambdas, true).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut z = vec![0.0; set.dim()];
    for _ in 0..20 {
        set.sample(&mut rng, &mut z);
        assert!((back.eval(&z) - q.eval(&z)).abs() < 1e-9);
    }
}

#[test]
fn grid_and_multistart_agree_on_circles() {
    let set = SetDescriptor::SphereProduct { m: 2, n: 2 };
    let q = random_poly(&set.layout(), 4, &mut ChaCha8Rng::seed_from_u64(34));
    let g = grid_minimize(&q, &set, 120).unwrap();
    let m = oracle::minimize(&q, &set, OracleBudget::default(), 1).unwrap();
    assert!((g.min_estimate - m.min_estimate).abs() < 1e-6, "{} vs {}", g.min_estimate, m.min_estimate);
}
