use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistlab_core::linked_twist::FlatPoint;
use twistlab_core::plumbing::{
    chart_backward, composite_twist, in_invariant_set, involution_global, lagrangian_leaf, lift_from_flat,
    rotation_global, transition, AmbientPoint, ChartPoint, PlumbingConfig, Pole,
};
use twistlab_core::twist_core::{project_to_tangent, symplectic_form, EquatorAngle, SphereCotangentPoint};

fn config(m: usize) -> PlumbingConfig {
    let exps = (0..m).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
    PlumbingConfig::new(m, 2, 0.1, exps).unwrap()
}

fn south_overlap_point(n: usize, rng: &mut ChaCha8Rng) -> SphereCotangentPoint {
    let t: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let s: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    chart_backward(&ChartPoint::new(t, s).unwrap(), Pole::South).unwrap()
}

#[test]
fn invariant_set_is_preserved_over_long_orbits() {
    for m in [2usize, 3, 4] {
        let c = config(m);
        let r = c.profile();
        let mut rng = ChaCha8Rng::seed_from_u64(70 + m as u64);
        for _ in 0..20 {
            let q = c.surface().sample_uniform(&mut rng);
            let mut p = lift_from_flat(&q, &c).unwrap();
            for _ in 0..1000 {
                p = composite_twist(&p, &c, &r).unwrap();
                assert!(p.point.off_circle_residual() < 1e-8);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn transition_is_symplectic(seed in any::<u64>(), n in 2usize..=3) {
        let c = PlumbingConfig::new(2, n, 0.1, vec![1, -1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = south_overlap_point(n, &mut rng);
        let dim = 2 * (n + 1);
        let tangent = |rng: &mut ChaCha8Rng| project_to_tangent(&p, &DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0)));
        let u = tangent(&mut rng);
        let w = tangent(&mut rng);
        let h = 1e-6;
        let push = |d: &DVector<f64>| {
            let img = |sgn: f64| {
                let z = p.to_vector() + d * (sgn * h);
                let q = SphereCotangentPoint::projected(
                    z.rows(0, n + 1).iter().cloned().collect(),
                    z.rows(n + 1, n + 1).iter().cloned().collect(),
                ).unwrap();
                transition(&AmbientPoint::new(1, q), &c).unwrap().point.to_vector()
            };
            (img(1.0) - img(-1.0)) / (2.0 * h)
        };
        let before = symplectic_form(&u, &w);
        let after = symplectic_form(&push(&u), &push(&w));
        prop_assert!((after - before).abs() < 1e-5, "{before} vs {after}");
    }

    #[test]
    fn rotation_commutes_with_transition(seed in any::<u64>(), alpha in -1.0f64..1.0, s in -1.0f64..1.0, n in 2usize..=4) {
        let c = PlumbingConfig::new(2, n, 0.1, vec![1, -1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let th = EquatorAngle::random(n, &mut rng);
        // alpha near 0 is the south pole region of sphere 1
        let p = AmbientPoint::new(1, SphereCotangentPoint::on_great_circle(n, alpha, s));
        let a = rotation_global(&transition(&p, &c).unwrap(), &th).unwrap();
        let b = transition(&rotation_global(&p, &th).unwrap(), &c).unwrap();
        prop_assert_eq!(a.sphere, b.sphere);
        prop_assert!(a.point.distance(&b.point) < 1e-8);
    }

    #[test]
    fn involution_fixes_exactly_the_invariant_set(seed in any::<u64>(), m in 2usize..=4) {
        let c = config(m);
        let r = c.profile();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = c.surface().sample_uniform(&mut rng);
        let on = lift_from_flat(&q, &c).unwrap();
        prop_assert!(in_invariant_set(&on));
        prop_assert!(involution_global(&on).point.distance(&on.point) < 1e-15);
        let off = AmbientPoint::new(1, SphereCotangentPoint::random(2, 0.15, &mut rng));
        let fixed = involution_global(&off).point.distance(&off.point) < 1e-12;
        prop_assert_eq!(fixed, in_invariant_set(&off));
        let a = involution_global(&composite_twist(&off, &c, &r).unwrap());
        let b = composite_twist(&involution_global(&off), &c, &r).unwrap();
        prop_assert!(a.point.distance(&b.point) < 1e-8);
    }

    #[test]
    fn twist_of_leaf_is_leaf_of_twisted_curve(seed in any::<u64>(), x0 in -3.0f64..0.0, y0 in -0.08f64..0.08) {
        let c = PlumbingConfig::new(2, 3, 0.1, vec![1, -1]).unwrap();
        let r = c.profile();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let thetas: Vec<EquatorAngle> = (0..5).map(|_| EquatorAngle::random(3, &mut rng)).collect();
        let curve: Vec<AmbientPoint> = (0..12)
            .map(|i| lift_from_flat(&FlatPoint::new(x0 + 0.01 * i as f64, y0 + 0.001 * i as f64), &c).unwrap())
            .collect();
        let leaf = lagrangian_leaf(&curve, &thetas, false).unwrap();
        let moved: Vec<AmbientPoint> = curve.iter().map(|p| composite_twist(p, &c, &r).unwrap()).collect();
        let image_leaf = lagrangian_leaf(&moved, &thetas, false).unwrap();
        let pushed = leaf.map_samples(|p| composite_twist(p, &c, &r)).unwrap();
        let pushed = twistlab_core::plumbing::LagrangianLeaf { samples: pushed, ..leaf.clone() };
        prop_assert!(pushed.cloud_distance(&image_leaf) < 1e-6);
        prop_assert!(leaf.omega_residual().unwrap() < 1e-6);
    }
}
