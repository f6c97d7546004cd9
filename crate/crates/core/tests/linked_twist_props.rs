use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twistlab_core::linked_twist::{composite_map, composite_map_inverse, shear_entries, FlatPoint, FlatSurface};
use twistlab_core::plumbing::PlumbingConfig;

/// Rectangle in raw flat coordinates.
fn inside(p: &FlatPoint, r: (f64, f64, f64, f64)) -> bool {
    p.x >= r.0 && p.x < r.1 && p.y >= r.2 && p.y < r.3
}

#[test]
fn composite_map_preserves_area() {
    let c = PlumbingConfig::new(2, 2, 0.1, vec![1, -1]).unwrap();
    let prof = c.profile();
    let s: FlatSurface = c.surface();
    let mut rng = ChaCha8Rng::seed_from_u64(400);
    let rects = [(-0.1, 0.1, -0.1, 0.1), (-2.0, -1.0, -0.1, 0.05), (-0.08, 0.02, 0.5, 2.5)];
    let total = 1_000_000;
    let mut source = [0usize; 3];
    let mut image = [0usize; 3];
    for _ in 0..total {
        let q = s.sample_uniform(&mut rng);
        let pre = composite_map_inverse(&q, &c, &prof);
        for (i, r) in rects.iter().enumerate() {
            source[i] += inside(&q, *r) as usize;
            image[i] += inside(&pre, *r) as usize;
        }
    }
    for i in 0..3 {
        let p = source[i] as f64 / total as f64;
        let sigma = (2.0 * p * (1.0 - p) / total as f64).sqrt();
        let diff = (source[i] as f64 - image[i] as f64).abs() / total as f64;
        assert!(diff <= 3.0 * sigma, "rect {i}: {} vs {}", source[i], image[i]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn shear_entries_are_nonnegative_when_corotating(seed in any::<u64>(), m in 2usize..=6, mags in prop::collection::vec(1i64..=4, 6), first_positive in any::<bool>()) {
        let exps: Vec<i64> = (0..m).map(|i| {
            let sign = if (i % 2 == 0) == first_positive { 1 } else { -1 };
            sign * mags[i]
        }).collect();
        let n = if m > 2 { 2 } else { 1 };
        let c = PlumbingConfig::new(m, n, 0.1, exps).unwrap();
        prop_assert!(c.co_rotating());
        let prof = c.profile();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = c.surface().sample_uniform(&mut rng);
        for e in shear_entries(&p, &c, &prof, 200) {
            prop_assert!(e.value >= 0.0, "{e:?}");
        }
    }

    #[test]
    fn inverse_undoes_forward(seed in any::<u64>(), k in -3i64..=3, l in -3i64..=3) {
        let c = PlumbingConfig::new(2, 2, 0.1, vec![k, l]).unwrap();
        let prof = c.profile();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = c.surface().sample_uniform(&mut rng);
        let q = composite_map_inverse(&composite_map(&p, &c, &prof), &c, &prof);
        prop_assert!(c.surface().distance(&p, &q) < 1e-12);
    }

    #[test]
    fn orbits_stay_on_the_surface(seed in any::<u64>(), m in 2usize..=5) {
        let exps = (0..m).map(|i| if i % 2 == 0 { 2 } else { -1 }).collect();
        let c = PlumbingConfig::new(m, 2, 0.1, exps).unwrap();
        let prof = c.profile();
        let s = c.surface();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = s.sample_uniform(&mut rng);
        for _ in 0..200 {
            p = composite_map(&p, &c, &prof);
            prop_assert!(s.owner(p.x, p.y).is_some());
            prop_assert_eq!(s.canonical_form(&p).unwrap().x, p.x);
        }
    }
}
