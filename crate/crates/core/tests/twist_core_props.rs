use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistlab_core::twist_core::{
    circle_action, dehn_twist, make_profile, project_to_tangent, rotation_map, symplectic_form, twist_jacobian,
    EquatorAngle, SphereCotangentPoint,
};

fn random_tangent(p: &SphereCotangentPoint, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let dim = 2 * (p.dim() + 1);
    let w = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
    project_to_tangent(p, &w)
}

#[test]
fn constraint_preserved_on_many_points() {
    let r = make_profile(0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for i in 0..100_000 {
        let n = 2 + i % 3;
        let p = SphereCotangentPoint::random(n, 0.12, &mut rng);
        let k = rng.gen_range(-5..=5);
        let q = dehn_twist(&p, &r, k);
        let (a, b) = q.constraint_residual();
        assert!(a.abs() < 1e-9 && b.abs() < 1e-9, "{a} {b}");
        assert!((q.covector_norm() - p.covector_norm()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_law(seed in any::<u64>(), k in -5i64..=5, l in -5i64..=5, n in 1usize..=4) {
        let r = make_profile(0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = SphereCotangentPoint::random(n, 0.12, &mut rng);
        let two = dehn_twist(&dehn_twist(&p, &r, l), &r, k);
        let one = dehn_twist(&p, &r, k + l);
        prop_assert!(two.distance(&one) < 1e-9);
    }

    #[test]
    fn jacobian_is_symplectic(seed in any::<u64>(), k in -3i64..=3, n in 2usize..=3) {
        let r = make_profile(0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = SphereCotangentPoint::random(n, 0.1, &mut rng);
        prop_assume!(p.covector_norm() > 1e-3);
        let j = twist_jacobian(&p, &r, k).unwrap();
        let u = random_tangent(&p, &mut rng);
        let w = random_tangent(&p, &mut rng);
        let before = symplectic_form(&u, &w);
        let after = symplectic_form(&(&j * &u), &(&j * &w));
        prop_assert!((after - before).abs() < 1e-5 * u.norm() * w.norm().max(1.0), "{before} vs {after}");
    }

    #[test]
    fn circle_action_commutes_with_rotation(seed in any::<u64>(), alpha in -3.0f64..3.0, s in -0.5f64..0.5, angle in -7.0f64..7.0, n in 2usize..=4) {
        prop_assume!(s.abs() > 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = SphereCotangentPoint::on_great_circle(n, alpha, s);
        let th = EquatorAngle::random(n, &mut rng);
        let a = rotation_map(&circle_action(&p, angle).unwrap(), &th).unwrap();
        let b = circle_action(&rotation_map(&p, &th).unwrap(), angle).unwrap();
        prop_assert!(a.distance(&b) < 1e-9);
    }

    #[test]
    fn profile_is_monotone_and_symmetric(t in -0.2f64..0.2, eps in 0.01f64..0.7) {
        let r = make_profile(eps).unwrap();
        prop_assert!((r.eval(t) + r.eval(-t) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        prop_assert!(r.deriv(t) <= 0.0);
        prop_assert!(r.deriv(t).abs() <= r.max_slope() * (1.0 + 1e-12));
    }
}
