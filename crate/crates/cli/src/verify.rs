//! Invariant batteries run by `twistlab verify`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use twistlab_core::hyperbolicity::{periodic_point_spectrum, solve_periodic_radii, Branch};
use twistlab_core::linked_twist::{
    composite_map, derivative_cocycle, inverse_derivative_cocycle, shear_entries, twist_map, FlatPoint,
};
use twistlab_core::mcg_floer::{hf_rank_sequence, hf_rank_square_twist};
use twistlab_core::plumbing::{
    ambient_distance, apply_twist_factor, composite_twist, lagrangian_leaf, lift_from_flat, reduce_to_flat,
    rotation_global, sample_thetas, transition, AmbientPoint, LagrangianLeaf, PlumbingConfig,
};
use twistlab_core::twist_core::{
    circle_action, dehn_twist, involution, rotation_map, EquatorAngle, SphereCotangentPoint, TwistProfile,
};

/// Sample size of the commutation and conjugacy batteries.
pub const STANDARD_SAMPLE: usize = 10_000;
/// Number of random rotated leaves in the Lagrangian battery.
pub const STANDARD_LEAVES: usize = 50;

pub const COMMUTATION_TOL: f64 = 1e-8;
pub const OMEGA_TOL: f64 = 1e-6;
pub const CLOUD_TOL: f64 = 1e-6;
pub const SPECTRUM_TOL: f64 = 1e-4;

/// One line of a pass/fail table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    /// Worst residual seen (or the measured quantity).
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    /// First failing sample, serialized.
    pub counterexample: Option<Value>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        Self { suite: suite.to_string(), checks: Vec::new(), counterexample: None }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, t: Tracker) {
        let passed = t.samples > 0 && t.worst < t.tolerance;
        if !passed && self.counterexample.is_none() {
            self.counterexample = Some(json!({
                "check": t.name,
                "value": t.worst,
                "witness": t.first_failure.clone().or(t.witness.clone()),
            }));
        }
        self.checks.push(Check { name: t.name, samples: t.samples, value: t.worst, tolerance: t.tolerance, passed });
    }

    fn merge(&mut self, other: SuiteReport) {
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
        self.checks.extend(other.checks);
    }

    pub fn header() -> [&'static str; 6] {
        ["suite", "check", "samples", "value", "tolerance", "passed"]
    }

    pub fn rows(&self) -> Vec<Vec<String>> {
        self.checks
            .iter()
            .map(|c| {
                vec![
                    self.suite.clone(),
                    c.name.clone(),
                    c.samples.to_string(),
                    crate::fmt_f(c.value),
                    crate::fmt_f(c.tolerance),
                    c.passed.to_string(),
                ]
            })
            .collect()
    }
}

/// Running maximum of a residual, remembering the first sample that broke the tolerance.
struct Tracker {
    name: String,
    tolerance: f64,
    worst: f64,
    samples: usize,
    witness: Option<Value>,
    first_failure: Option<Value>,
}

impl Tracker {
    fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self { name: name.into(), tolerance, worst: 0.0, samples: 0, witness: None, first_failure: None }
    }

    fn record(&mut self, r: f64, witness: impl FnOnce() -> Value) {
        self.samples += 1;
        let r = if r.is_nan() { f64::INFINITY } else { r };
        let first_bad = r >= self.tolerance && self.first_failure.is_none();
        let new_worst = r > self.worst || self.witness.is_none();
        if first_bad || new_worst {
            let w = witness();
            if first_bad {
                self.first_failure = Some(w.clone());
            }
            if new_worst {
                self.witness = Some(w);
            }
        }
        self.worst = self.worst.max(r);
    }

    /// Counts a sample whose computation itself failed.
    fn fail(&mut self, detail: String) {
        self.record(f64::INFINITY, || json!({ "error": detail }));
    }
}

fn point_json(p: &SphereCotangentPoint) -> Value {
    json!({ "x": p.x().as_slice(), "v": p.v().as_slice() })
}

fn ambient_json(p: &AmbientPoint) -> Value {
    json!({ "sphere": p.sphere, "x": p.point.x().as_slice(), "v": p.point.v().as_slice() })
}

fn theta_json(t: &EquatorAngle) -> Value {
    json!(t.theta().as_slice())
}

/// Commutation identities on single spheres and across the gluing:
/// twist with rotation on the great-circle bundle, involution with twist,
/// rotation with the transition map, and circle action with rotation.
pub fn identities(n: usize, epsilon: f64, samples: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("identities");
    let Ok(profile) = TwistProfile::new(epsilon) else {
        let mut t = Tracker::new("profile", COMMUTATION_TOL);
        t.fail(format!("epsilon {epsilon} rejected"));
        rep.push(t);
        return rep;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tw_rot = Tracker::new("twist-rotation", COMMUTATION_TOL);
    let mut inv_tw = Tracker::new("involution-twist", COMMUTATION_TOL);
    let mut rot_tr = Tracker::new("rotation-transition", COMMUTATION_TOL);
    let mut circ_rot = Tracker::new("circle-rotation", COMMUTATION_TOL);
    let gluing = PlumbingConfig::new(2, n, epsilon, vec![1, -1]);
    for _ in 0..samples {
        let theta = EquatorAngle::random(n, &mut rng);
        let power = rng.gen_range(-3i64..=3);
        let alpha = rng.gen_range(-PI..PI);
        let s = rng.gen_range(-1.5 * epsilon..1.5 * epsilon);
        let p = SphereCotangentPoint::on_great_circle(n, alpha, s);
        match (rotation_map(&p, &theta), rotation_map(&dehn_twist(&p, &profile, power), &theta)) {
            (Ok(rp), Ok(b)) => {
                let a = dehn_twist(&rp, &profile, power);
                tw_rot.record(a.distance(&b), || json!({ "p": point_json(&p), "theta": theta_json(&theta), "power": power }));
            }
            (Err(e), _) | (_, Err(e)) => tw_rot.fail(e.to_string()),
        }

        let q = SphereCotangentPoint::random(n, 1.5 * epsilon, &mut rng);
        let a = involution(&dehn_twist(&q, &profile, power));
        let b = dehn_twist(&involution(&q), &profile, power);
        inv_tw.record(a.distance(&b), || json!({ "p": point_json(&q), "power": power }));

        if let Ok(cfg) = &gluing {
            // near the south pole of the first sphere, inside the overlap
            let g = AmbientPoint::new(1, SphereCotangentPoint::on_great_circle(n, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let lhs = transition(&g, cfg).and_then(|t| rotation_global(&t, &theta));
            let rhs = rotation_global(&g, &theta).and_then(|r| transition(&r, cfg));
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => {
                    let r = if a.sphere == b.sphere { a.point.distance(&b.point) } else { f64::INFINITY };
                    rot_tr.record(r, || json!({ "p": ambient_json(&g), "theta": theta_json(&theta) }));
                }
                (Err(e), _) | (_, Err(e)) => rot_tr.fail(e.to_string()),
            }
        }

        let angle = rng.gen_range(-PI..PI);
        let s = if s == 0.0 { epsilon } else { s };
        let p = SphereCotangentPoint::on_great_circle(n, alpha, s);
        let lhs = rotation_map(&p, &theta).and_then(|r| circle_action(&r, angle));
        let rhs = circle_action(&p, angle).and_then(|c| rotation_map(&c, &theta));
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => {
                circ_rot.record(a.distance(&b), || json!({ "p": point_json(&p), "theta": theta_json(&theta), "angle": angle }))
            }
            (Err(e), _) | (_, Err(e)) => circ_rot.fail(e.to_string()),
        }
    }
    if let Err(e) = gluing {
        rot_tr.fail(e.to_string());
    }
    for t in [tw_rot, inv_tw, rot_tr, circ_rot] {
        rep.push(t);
    }
    rep
}

/// Conjugacy between the flat band maps and the twists on the invariant set:
/// lift of `T_j^{k_j} q` against `tau_j^{k_j}` of the lift, the same for the
/// composite, and the lift/reduce round trip.
pub fn conjugacy(cfg: &PlumbingConfig, samples: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("conjugacy");
    let tag = format!("m={}", cfg.m());
    let s = cfg.surface();
    let r = cfg.profile();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Tracker::new(format!("{tag} factor-twists"), COMMUTATION_TOL);
    let mut composite = Tracker::new(format!("{tag} composite"), COMMUTATION_TOL);
    let mut round = Tracker::new(format!("{tag} lift-reduce"), COMMUTATION_TOL);
    for _ in 0..samples {
        let q = s.sample_uniform(&mut rng);
        let witness = || json!({ "x": q.x, "y": q.y, "band": q.band });
        let lifted = match lift_from_flat(&q, cfg) {
            Ok(p) => p,
            Err(e) => {
                round.fail(e.to_string());
                continue;
            }
        };
        match reduce_to_flat(&lifted, cfg) {
            Ok(back) => round.record(s.distance(&q, &back), witness),
            Err(e) => round.fail(e.to_string()),
        }
        let mut worst = 0.0f64;
        for (j, &k) in cfg.exponents().iter().enumerate() {
            match lift_from_flat(&twist_map(&s, j + 1, k, &q, &r), cfg) {
                Ok(a) => worst = worst.max(ambient_distance(&a, &apply_twist_factor(&lifted, j + 1, k, &r))),
                Err(_) => worst = f64::INFINITY,
            }
        }
        factors.record(worst, witness);
        let a = lift_from_flat(&composite_map(&q, cfg, &r), cfg);
        let b = composite_twist(&lifted, cfg, &r);
        match (a, b) {
            (Ok(a), Ok(b)) => composite.record(ambient_distance(&a, &b), witness),
            (Err(e), _) | (_, Err(e)) => composite.fail(e.to_string()),
        }
    }
    for t in [factors, composite, round] {
        rep.push(t);
    }
    rep
}

/// Random rotated leaves over short flat segments: omega vanishing at
/// interior samples, and the composite twist of a leaf against the leaf of
/// the twisted curve.
pub fn lagrangian(cfg: &PlumbingConfig, leaves: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("lagrangian");
    let s = cfg.surface();
    let r = cfg.profile();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut omega = Tracker::new("omega-residual", OMEGA_TOL);
    let mut cloud = Tracker::new("twist-of-leaf", CLOUD_TOL);
    let mut made = 0;
    let mut attempts = 0;
    while made < leaves && attempts < 20 * leaves {
        attempts += 1;
        let q0 = s.sample_uniform(&mut rng);
        let dir = rng.gen_range(0.0..2.0 * PI);
        let step = 0.004;
        let flat: Vec<FlatPoint> =
            (0..12).map(|i| FlatPoint::new(q0.x + step * i as f64 * dir.cos(), q0.y + step * i as f64 * dir.sin())).collect();
        let Ok(curve) = flat.iter().map(|q| lift_from_flat(q, cfg)).collect::<Result<Vec<_>, _>>() else {
            continue;
        };
        // a leaf must stay on one sphere's chart to be sampled as one sheet
        if curve.iter().any(|p| p.sphere != curve[0].sphere) {
            continue;
        }
        let thetas = sample_thetas(cfg.n(), 6, &mut rng);
        let witness = || json!({ "start": [q0.x, q0.y], "direction": dir });
        let leaf = match lagrangian_leaf(&curve, &thetas, false) {
            Ok(l) => l,
            Err(e) => {
                omega.fail(e.to_string());
                made += 1;
                continue;
            }
        };
        made += 1;
        match leaf.omega_residual() {
            Ok(w) => omega.record(w, witness),
            Err(e) => omega.fail(e.to_string()),
        }
        let moved: Result<Vec<AmbientPoint>, _> = curve.iter().map(|p| composite_twist(p, cfg, &r)).collect();
        let image = moved.and_then(|m| lagrangian_leaf(&m, &thetas, false));
        let pushed = leaf.map_samples(|p| composite_twist(p, cfg, &r));
        match (image, pushed) {
            (Ok(image), Ok(pushed)) => {
                let pushed = LagrangianLeaf { samples: pushed, ..leaf.clone() };
                cloud.record(pushed.cloud_distance(&image), witness);
            }
            (Err(e), _) | (_, Err(e)) => cloud.fail(e.to_string()),
        }
    }
    rep.push(omega);
    rep.push(cloud);
    rep
}

/// Derivative cocycle against finite differences of the flat map, unit
/// determinant over short products, nonnegative shear entries for
/// co-rotating exponents, and forward/backward exponent duality.
pub fn cocycle(cfg: &PlumbingConfig, samples: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("cocycle");
    let s = cfg.surface();
    let r = cfg.profile();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fd = Tracker::new("finite-difference", 1e-4);
    let mut det = Tracker::new("log-det", 1e-6);
    let mut cone = Tracker::new("nonnegative-entries", 1e-300);
    let mut dual = Tracker::new("duality", 1.0);
    for _ in 0..samples {
        let p = s.sample_uniform(&mut rng);
        let witness = || json!({ "x": p.x, "y": p.y });
        let rec = derivative_cocycle(&p, cfg, &r, 4);
        if !rec.boundary_flag {
            let exact = rec.cocycle.full_matrix();
            let h = 1e-7;
            let image = |dx: f64, dy: f64| {
                s.canonical_form(&FlatPoint::new(p.x + dx, p.y + dy))
                    .map(|q| (0..4).fold(q, |q, _| composite_map(&q, cfg, &r)))
            };
            let mut worst = 0.0f64;
            let scale = exact.iter().flatten().fold(1.0f64, |a, b| a.max(b.abs()));
            for (j, (dx, dy)) in [(h, 0.0), (0.0, h)].into_iter().enumerate() {
                match (image(dx, dy), image(-dx, -dy)) {
                    (Ok(a), Ok(b)) => {
                        let (ex, ey) = s.displacement(&b, &a);
                        worst = worst.max((ex / (2.0 * h) - exact[0][j]).abs() / scale);
                        worst = worst.max((ey / (2.0 * h) - exact[1][j]).abs() / scale);
                    }
                    _ => worst = f64::INFINITY,
                }
            }
            fd.record(worst, witness);
        }
        det.record(derivative_cocycle(&p, cfg, &r, 3).cocycle.log_det().abs(), witness);
        if cfg.co_rotating() {
            let most_negative = shear_entries(&p, cfg, &r, 20).iter().map(|e| -e.value).fold(0.0, f64::max);
            cone.record(most_negative, witness);
        }
        let n = 50;
        let fwd = derivative_cocycle(&p, cfg, &r, n);
        let back = inverse_derivative_cocycle(&fwd.endpoint, cfg, &r, n);
        let (s1, s2) = fwd.cocycle.singular_values();
        let allowed = (2.0 / n as f64 * (s1 / s2).ln()).max(1e-12);
        let gap = (back.cocycle.log_norm() - fwd.cocycle.log_norm()).abs() / n as f64;
        // reported as a fraction of the allowed gap
        dual.record(gap / allowed, witness);
    }
    rep.push(fd);
    rep.push(det);
    if cfg.co_rotating() {
        rep.push(cone);
    }
    rep.push(dual);
    rep
}

/// Periodic-point spectra on a 20-point sweep: four exponent pairs with
/// twist angles `2 pi / |k|`, five angles between `u` and `v` each.
pub fn spectra(epsilon: f64) -> SuiteReport {
    let mut rep = SuiteReport::new("spectra");
    let Ok(profile) = TwistProfile::new(epsilon) else {
        let mut t = Tracker::new("profile", SPECTRUM_TOL);
        t.fail(format!("epsilon {epsilon} rejected"));
        rep.push(t);
        return rep;
    };
    let pairs = [(3i64, -3i64), (4, -4), (3, -4), (5, -3)];
    let phis = [0.3, 0.9, 1.4, 2.2, 2.8];
    let mut mismatch = Tracker::new("closed-form-vs-fd", SPECTRUM_TOL);
    let mut product = Tracker::new("unit-product", 1e-9);
    let mut trace = Tracker::new("trace-above-4", 1.0);
    let mut ortho = Tracker::new("orthogonal-all-one", 1e-9);
    let mut swap = Tracker::new("branch-swap", 1.0);
    let at = |k: i64, l: i64, phi: f64| {
        let h1 = profile.inverse(2.0 * PI / k.unsigned_abs() as f64).expect("angle in range");
        let h2 = profile.inverse(2.0 * PI / l.unsigned_abs() as f64).expect("angle in range");
        let (u, v) = solve_periodic_radii([1.0, 0.0], [phi.cos(), phi.sin()], h1, h2);
        (u, v, periodic_point_spectrum(u, v, k, l, &profile))
    };
    for &(k, l) in &pairs {
        for &phi in &phis {
            let (u, v, sp) = at(k, l, phi);
            let witness = || json!({ "k": k, "l": l, "u": u, "v": v });
            match sp {
                Ok(sp) => {
                    mismatch.record(sp.max_relative_mismatch, witness);
                    let unit = (sp.eigenvalues[0][0] * sp.eigenvalues[3][0] - 1.0).abs()
                        + (sp.eigenvalues[1][0] - 1.0).abs()
                        + (sp.eigenvalues[2][0] - 1.0).abs();
                    product.record(unit, witness);
                    // 0 when the trace exceeds 4, else the shortfall plus one
                    trace.record(if sp.full_trace > 4.0 { 0.0 } else { 1.0 + 4.0 - sp.full_trace }, witness);
                }
                Err(e) => mismatch.fail(e.to_string()),
            }
        }
        let (u, v, sp) = at(k, l, PI / 2.0);
        match sp {
            Ok(sp) => {
                let dev = sp.eigenvalues.iter().map(|z| (z[0] - 1.0).abs() + z[1].abs()).fold(0.0, f64::max);
                ortho.record(dev, || json!({ "k": k, "l": l, "u": u, "v": v }));
            }
            Err(e) => ortho.fail(e.to_string()),
        }
        for &phi in &phis[..2] {
            let a = at(k, l, phi).2;
            let b = at(k, l, PI - phi).2;
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    let flipped = a.inner_product() * b.inner_product() < 0.0
                        && matches!((a.expanding, b.expanding), (Some(Branch::Plus), Some(Branch::Minus)) | (Some(Branch::Minus), Some(Branch::Plus)));
                    swap.record(if flipped { 0.0 } else { 1.0 }, || json!({ "k": k, "l": l, "phi": phi }));
                }
                (Err(e), _) | (_, Err(e)) => swap.fail(e.to_string()),
            }
        }
    }
    for t in [mismatch, product, trace, ortho, swap] {
        rep.push(t);
    }
    rep
}

/// Exact ranks: the (3,3) sequence, a naive integer-iteration oracle on a
/// sweep of exponent pairs, and the square-twist ranks `2k`.
pub fn ranks() -> SuiteReport {
    let mut rep = SuiteReport::new("ranks");
    let mut head = Tracker::new("(3,3) ranks 1, 8, 55", 0.5);
    let seq = hf_rank_sequence(3, 3, 3);
    let got: Vec<Option<String>> = seq.values.iter().map(|v| v.as_ref().map(|b| b.to_string())).collect();
    let want = ["1", "8", "55"];
    let ok = got.iter().zip(want).all(|(g, w)| g.as_deref() == Some(w));
    head.record(if ok { 0.0 } else { 1.0 }, || json!({ "got": got }));
    rep.push(head);

    let mut oracle = Tracker::new("naive-iteration", 0.5);
    for k in -6i64..=6 {
        for l in -6i64..=6 {
            let seq = hf_rank_sequence(k, l, 20);
            let m = [[1 - k * l, l], [-k, 1]].map(|r| r.map(|e| e as i128));
            let mut v = [0i128, 1];
            let mut bad = None;
            for (i, got) in seq.values.iter().enumerate() {
                v = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
                let expected = v[1].abs().to_string();
                if let Some(g) = got {
                    if g.to_string() != expected {
                        bad = Some(json!({ "k": k, "l": l, "n": i + 1, "got": g.to_string(), "expected": expected }));
                        break;
                    }
                }
            }
            let failed = bad.is_some();
            oracle.record(if failed { 1.0 } else { 0.0 }, || bad.unwrap_or(Value::Null));
        }
    }
    rep.push(oracle);

    let mut square = Tracker::new("square-twist 2k", 0.5);
    for k in 0u64..=100 {
        let r = hf_rank_square_twist(k);
        let ok = r == (2 * k).into();
        square.record(if ok { 0.0 } else { 1.0 }, || json!({ "k": k, "rank": r.to_string() }));
    }
    rep.push(square);
    rep
}

/// Runs one named suite with the parameters of `cfg`.
pub fn run_suite(suite: crate::Suite, cfg: &PlumbingConfig, seed: u64) -> SuiteReport {
    use crate::Suite::*;
    match suite {
        Identities => identities(cfg.n(), cfg.epsilon(), STANDARD_SAMPLE, seed),
        Conjugacy => conjugacy(cfg, STANDARD_SAMPLE, seed),
        Lagrangian => lagrangian(cfg, STANDARD_LEAVES, seed),
        Cocycle => cocycle(cfg, 2000, seed),
        Spectra => spectra(cfg.epsilon()),
        Ranks => ranks(),
    }
}

/// Several reports folded into one under a common suite name.
pub fn combine(suite: &str, reports: Vec<SuiteReport>) -> SuiteReport {
    let mut out = SuiteReport::new(suite);
    for r in reports {
        out.merge(r);
    }
    out
}
