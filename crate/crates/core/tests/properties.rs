use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sphere_sos::conic::{read_problem, write_problem};
use sphere_sos::harmonic::multigrade_decompose;
use sphere_sos::moment::build_relaxation;
use sphere_sos::ortho::{gegenbauer_all, gegenbauer_eval, harmonic_dimension};
use sphere_sos::poly::{random_poly, RealPoly, VariableLayout};
use sphere_sos::qwass::{transport_cost, validate_state, Atom, QuantumState, TransportPlan};
use sphere_sos::SetDescriptor;

fn poly(seed: u64, layout: &VariableLayout, degree: usize) -> RealPoly {
    random_poly(layout, degree, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn point(seed: u64, set: &SetDescriptor) -> Vec<f64> {
    let mut z = vec![0.0; set.dim()];
    set.sample(&mut ChaCha8Rng::seed_from_u64(seed), &mut z);
    z
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn unit(v: &[(f64, f64)]) -> Vec<Complex64> {
    let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
    v.iter().map(|&(a, b)| Complex64::new(a / norm, b / norm)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let l = VariableLayout::bipartite(2);
        let (a, b, c) = (poly(s1, &l, 2), poly(s2, &l, 2), poly(s3, &l, 1));
        let z = point(s1 ^ s2, &SetDescriptor::Hypercube { n: 4 });
        let e = |p: &RealPoly| p.eval(&z);
        prop_assert!(close(e(&(&a + &b)), e(&(&b + &a)), 1e-12));
        prop_assert!(close(e(&(&a * &b)), e(&(&b * &a)), 1e-12));
        prop_assert!(close(e(&(&(&a * &b) * &c)), e(&(&a * &(&b * &c))), 1e-10));
        prop_assert!(close(e(&(&a * &(&b + &c))), e(&(&(&a * &b) + &(&a * &c))), 1e-10));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!((&a * &b).degree(), a.degree() + b.degree());
    }

    #[test]
    fn evaluation_is_a_homomorphism(s1 in any::<u64>(), s2 in any::<u64>()) {
        let l = VariableLayout::single(3);
        let (a, b) = (poly(s1, &l, 3), poly(s2, &l, 2));
        let z = point(s2, &SetDescriptor::Hypercube { n: 3 });
        prop_assert!(close((&a * &b).eval(&z), a.eval(&z) * b.eval(&z), 1e-11));
        prop_assert!(close((&a + &b).eval(&z), a.eval(&z) + b.eval(&z), 1e-12));
    }

    #[test]
    fn laplacian_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), k in -3.0f64..3.0) {
        let l = VariableLayout::bipartite(3);
        let (a, b) = (poly(s1, &l, 4), poly(s2, &l, 4));
        let lhs = (&a.scale(k) + &b).laplacian("x").unwrap();
        let rhs = &a.laplacian("x").unwrap().scale(k) + &b.laplacian("x").unwrap();
        prop_assert!((&lhs - &rhs).max_abs_coeff() < 1e-10);
    }

    #[test]
    fn polynomial_json_round_trip(s in any::<u64>()) {
        let p = poly(s, &VariableLayout::bipartite(3), 3);
        let text = p.to_json_value().to_string();
        prop_assert_eq!(RealPoly::from_json_str(&text).unwrap(), p);
    }

    #[test]
    fn problem_export_round_trip(s in any::<u64>(), t in 1usize..3) {
        let set = SetDescriptor::SphereProduct { m: 2, n: 2 };
        let q = poly(s, &set.layout(), 2);
        let p = build_relaxation(&q, &set, t).unwrap();
        let text = write_problem(&p.conic);
        prop_assert_eq!(read_problem(&text).unwrap(), p.conic);
    }

    #[test]
    fn harmonic_components_reconstruct(s in any::<u64>(), n in 3usize..5, d in 0usize..5) {
        let set = SetDescriptor::SphereProduct { m: 2, n };
        let q = poly(s, &set.layout(), d);
        let dec = multigrade_decompose(&q, &set.layout()).unwrap();
        let z = point(s.wrapping_add(1), &set);
        prop_assert!(close(dec.sum(&set.layout()).eval(&z), q.eval(&z), 1e-10));
        for c in dec.components.values() {
            prop_assert!(c.laplacian("x").unwrap().max_abs_coeff() < 1e-9);
            prop_assert!(c.laplacian("y").unwrap().max_abs_coeff() < 1e-9);
        }
    }

    #[test]
    fn gegenbauer_batch_matches_single(n in 3usize..8, x in -1.0f64..1.0) {
        let all = gegenbauer_all(n, 10, x).unwrap();
        for (k, v) in all.iter().enumerate() {
            prop_assert!(close(*v, gegenbauer_eval(n, k, x).unwrap(), 1e-12));
            prop_assert!(v.abs() <= harmonic_dimension(n, k).unwrap() as f64 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn cost_is_phase_invariant(
        u in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2),
        v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2),
        phase in 0.0f64..std::f64::consts::TAU,
    ) {
        prop_assume!(u.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3);
        prop_assume!(v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3);
        let (u, v) = (unit(&u), unit(&v));
        let rot = Complex64::from_polar(1.0, phase);
        let plan = TransportPlan::new(vec![Atom { weight: 1.0, u: u.clone(), v: v.clone() }]).unwrap();
        let turned = TransportPlan::new(vec![Atom { weight: 1.0, u: u.iter().map(|z| z * rot).collect(), v }]).unwrap();
        let (c1, c2) = (transport_cost(&plan), transport_cost(&turned));
        prop_assert!(close(c1, c2, 1e-12));
        prop_assert!((-2.0 - 1e-12..=2.0 + 1e-12).contains(&c1));
    }

    #[test]
    fn state_json_round_trip(a in 0.0f64..1.0, re in -0.4f64..0.4, im in -0.4f64..0.4) {
        let off = Complex64::new(re, im) * (a * (1.0 - a)).sqrt();
        let m = DMatrix::from_row_slice(2, 2, &[Complex64::new(a, 0.0), off, off.conj(), Complex64::new(1.0 - a, 0.0)]);
        let s = validate_state(&m).unwrap();
        let back = QuantumState::from_json_str(&s.to_json().to_string()).unwrap();
        prop_assert!((back.matrix() - s.matrix()).norm() < 1e-15);
    }

    #[test]
    fn set_descriptor_round_trip(m in 1usize..5, n in 2usize..9) {
        let s = SetDescriptor::SphereProduct { m, n };
        prop_assert_eq!(s.to_string().parse::<SetDescriptor>().unwrap(), s);
        let c = SetDescriptor::Hypercube { n };
        prop_assert_eq!(c.to_string().parse::<SetDescriptor>().unwrap(), c);
    }
}
