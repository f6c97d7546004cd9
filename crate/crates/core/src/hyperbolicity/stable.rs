//! Stable directions, stable curves by pullback, and their Lagrangian lifts.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TwistError};
use crate::linked_twist::{
    composite_map, composite_map_inverse, derivative_cocycle, inverse_derivative_cocycle, CocycleRecord, FlatPoint,
    FlatSurface,
};
use crate::plumbing::{ambient_distance, composite_twist, lagrangian_leaf, lift_from_flat, LagrangianLeaf, PlumbingConfig};
use crate::twist_core::{EquatorAngle, TwistProfile};

/// Smallest finite-time exponent accepted as hyperbolic.
pub const HYPERBOLICITY_THRESHOLD: f64 = 0.05;

/// Iterates over which endpoint contraction is recorded.
pub const CONTRACTION_STEPS: usize = 20;

/// Smallest `log(sigma_1 / sigma_2)` for which the singular directions are trusted.
const MIN_LOG_GAP: f64 = 1e-3;

/// Which map generates the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dynamics {
    Forward,
    Inverse,
}

impl Dynamics {
    pub fn reversed(self) -> Self {
        match self {
            Dynamics::Forward => Dynamics::Inverse,
            Dynamics::Inverse => Dynamics::Forward,
        }
    }

    fn cocycle(self, p: &FlatPoint, cfg: &PlumbingConfig, profile: &TwistProfile, n: usize) -> CocycleRecord {
        match self {
            Dynamics::Forward => derivative_cocycle(p, cfg, profile, n),
            Dynamics::Inverse => inverse_derivative_cocycle(p, cfg, profile, n),
        }
    }

    fn step(self, p: &FlatPoint, cfg: &PlumbingConfig, profile: &TwistProfile) -> FlatPoint {
        match self {
            Dynamics::Forward => composite_map(p, cfg, profile),
            Dynamics::Inverse => composite_map_inverse(p, cfg, profile),
        }
    }
}

/// A unit direction together with the exponent and singular gap behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionEstimate {
    pub direction: [f64; 2],
    pub chi: f64,
    pub log_gap: f64,
}

fn canonical_sign(u: [f64; 2]) -> [f64; 2] {
    let n = u[0].hypot(u[1]);
    let u = [u[0] / n, u[1] / n];
    if u[0] < 0.0 || (u[0] == 0.0 && u[1] < 0.0) {
        [-u[0], -u[1]]
    } else {
        u
    }
}

/// Least-stretched right-singular direction of the `n`-step derivative of `dynamics`.
pub fn stable_direction_with(
    p: &FlatPoint,
    cfg: &PlumbingConfig,
    profile: &TwistProfile,
    n: usize,
    dynamics: Dynamics,
    threshold: f64,
) -> Result<DirectionEstimate> {
    if n == 0 {
        return Err(TwistError::NonHyperbolic("zero steps".into()));
    }
    let rec = dynamics.cocycle(p, cfg, profile, n);
    let chi = rec.cocycle.log_norm() / n as f64;
    let (s1, s2) = rec.cocycle.singular_values();
    let log_gap = if s2 > 0.0 { (s1 / s2).ln() } else { f64::INFINITY };
    if !(chi >= threshold) {
        return Err(TwistError::NonHyperbolic(format!("exponent {chi:.3e} below {threshold}")));
    }
    if !(log_gap >= MIN_LOG_GAP) {
        return Err(TwistError::NonHyperbolic(format!("singular gap {log_gap:.3e} too small")));
    }
    let v = rec.cocycle.top_right_singular();
    Ok(DirectionEstimate { direction: canonical_sign([-v[1], v[0]]), chi, log_gap })
}

/// Stable direction of the composite map at `p` from `n` forward steps.
pub fn stable_direction(p: &FlatPoint, cfg: &PlumbingConfig, profile: &TwistProfile, n: usize) -> Result<[f64; 2]> {
    stable_direction_with(p, cfg, profile, n, Dynamics::Forward, HYPERBOLICITY_THRESHOLD).map(|d| d.direction)
}

/// Unstable direction of `dynamics` at `p`: the stable direction of the reversed dynamics.
pub fn unstable_direction(
    p: &FlatPoint,
    cfg: &PlumbingConfig,
    profile: &TwistProfile,
    n: usize,
    dynamics: Dynamics,
) -> Result<[f64; 2]> {
    stable_direction_with(p, cfg, profile, n, dynamics.reversed(), HYPERBOLICITY_THRESHOLD).map(|d| d.direction)
}

/// Tuning of the pullback construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableCurveOptions {
    pub arc_length: f64,
    /// Steps used for every stable-direction estimate.
    pub direction_steps: usize,
    pub hausdorff_tol: f64,
    /// Largest backward stretch of the seed segment.
    pub max_expansion: f64,
    pub max_points: usize,
}

impl Default for StableCurveOptions {
    fn default() -> Self {
        Self { arc_length: 0.05, direction_steps: 200, hausdorff_tol: 1e-5, max_expansion: 1e9, max_points: 4000 }
    }
}

/// A sampled local stable curve through `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableLeafSample {
    pub base: FlatPoint,
    pub direction: [f64; 2],
    pub chi: f64,
    pub polyline: Vec<FlatPoint>,
    /// Index of `base` in the polyline.
    pub base_index: usize,
    pub pullback_steps: usize,
    pub hausdorff_change: f64,
    pub converged: bool,
    /// Angle between the discrete tangent at `base` and `direction`.
    pub tangent_error: f64,
    /// Per-step ratios `d_j / d_(j-1)` of the endpoint distance over
    /// [`CONTRACTION_STEPS`] forward iterates.
    pub contraction_rates: Vec<f64>,
}

impl StableLeafSample {
    pub fn length(&self, surface: &FlatSurface) -> f64 {
        self.polyline.windows(2).map(|w| surface.distance(&w[0], &w[1])).sum()
    }

    /// Distances between the forward iterates of the two endpoints, `d_0..=d_steps`.
    pub fn endpoint_distances(&self, cfg: &PlumbingConfig, profile: &TwistProfile, steps: usize) -> Vec<f64> {
        let s = cfg.surface();
        let mut a = self.polyline[0];
        let mut b = *self.polyline.last().expect("nonempty polyline");
        let mut out = vec![s.distance(&a, &b)];
        for _ in 0..steps {
            a = composite_map(&a, cfg, profile);
            b = composite_map(&b, cfg, profile);
            out.push(s.distance(&a, &b));
        }
        out
    }
}

fn offset_point(s: &FlatSurface, q: &FlatPoint, e: [f64; 2], sigma: f64) -> Option<FlatPoint> {
    s.canonical_form(&FlatPoint::new(q.x + sigma * e[0], q.y + sigma * e[1])).ok()
}

fn pull_back(p: FlatPoint, m: usize, cfg: &PlumbingConfig, profile: &TwistProfile, dynamics: Dynamics) -> FlatPoint {
    let back = dynamics.reversed();
    (0..m).fold(p, |q, _| back.step(&q, cfg, profile))
}

fn point_segment_distance(s: &FlatSurface, p: &FlatPoint, a: &FlatPoint, b: &FlatPoint) -> f64 {
    let (dx, dy) = s.displacement(a, p);
    let (sx, sy) = s.displacement(a, b);
    let l2 = sx * sx + sy * sy;
    let t = if l2 > 0.0 { ((dx * sx + dy * sy) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (dx - t * sx).hypot(dy - t * sy)
}

fn directed_hausdorff(s: &FlatSurface, a: &[FlatPoint], b: &[FlatPoint]) -> f64 {
    a.iter()
        .map(|p| {
            if b.len() == 1 {
                return s.distance(p, &b[0]);
            }
            b.windows(2).map(|w| point_segment_distance(s, p, &w[0], &w[1])).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two polylines on the band surface.
pub fn polyline_hausdorff(s: &FlatSurface, a: &[FlatPoint], b: &[FlatPoint]) -> f64 {
    directed_hausdorff(s, a, b).max(directed_hausdorff(s, b, a))
}

struct Pullback {
    polyline: Vec<FlatPoint>,
    base_index: usize,
}

/// Pulls the segment `q + sigma e_q`, `|sigma| <= eta`, back by `m` steps,
/// refines until consecutive images are close, and trims to arc length `l`
/// about the image of `q`.
#[allow(clippy::too_many_arguments)]
fn pull_back_segment(
    q: &FlatPoint,
    eq: [f64; 2],
    eta: f64,
    m: usize,
    l: f64,
    cfg: &PlumbingConfig,
    profile: &TwistProfile,
    dynamics: Dynamics,
    max_points: usize,
) -> Option<Pullback> {
    let s = cfg.surface();
    let image = |sigma: f64| offset_point(&s, q, eq, sigma).map(|z| pull_back(z, m, cfg, profile, dynamics));
    let h_max = l / 64.0;
    let mut pts: Vec<(f64, FlatPoint)> = Vec::new();
    for i in 0..=32 {
        let sigma = eta * (i as f64 / 16.0 - 1.0);
        if let Some(z) = image(sigma) {
            pts.push((sigma, z));
        } else if i <= 16 {
            pts.clear();
        } else {
            break;
        }
    }
    if pts.len() < 3 {
        return None;
    }
    loop {
        let mut next = Vec::with_capacity(pts.len() * 2);
        let mut changed = false;
        for w in pts.windows(2) {
            next.push(w[0]);
            if s.distance(&w[0].1, &w[1].1) > h_max && pts.len() + next.len() < 2 * max_points {
                let mid = 0.5 * (w[0].0 + w[1].0);
                if let Some(z) = image(mid) {
                    next.push((mid, z));
                    changed = true;
                }
            }
        }
        next.push(*pts.last().expect("nonempty"));
        pts = next;
        if !changed || pts.len() >= max_points {
            break;
        }
    }
    let base = pts.iter().position(|(sg, _)| *sg == 0.0)?;
    let half = 0.5 * l;
    // The cut point is found by bisection in the seed parameter so that it is
    // itself a pulled-back point; interpolating between images would leave it
    // off the curve by an amount the forward map then expands.
    let walk = |range: Box<dyn Iterator<Item = usize>>| {
        let mut out = vec![pts[base].1];
        let mut acc = 0.0;
        let mut prev = pts[base];
        for i in range {
            let z = pts[i];
            let d = s.distance(&prev.1, &z.1);
            if acc + d >= half {
                let need = half - acc;
                let (mut lo, mut hi) = (prev.0, z.0);
                let mut end = z.1;
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let Some(w) = image(mid) else { break };
                    if s.distance(&prev.1, &w) < need {
                        lo = mid;
                    } else {
                        hi = mid;
                        end = w;
                    }
                }
                out.push(end);
                return (out, true);
            }
            acc += d;
            out.push(z.1);
            prev = z;
        }
        (out, false)
    };
    let (mut left, lok) = walk(Box::new((0..base).rev()));
    let (right, rok) = walk(Box::new(base + 1..pts.len()));
    if !(lok && rok) {
        return None;
    }
    left.reverse();
    let base_index = left.len() - 1;
    left.extend_from_slice(&right[1..]);
    Some(Pullback { polyline: left, base_index })
}

/// Local stable curve of arc length `opts.arc_length` through `p`, built by
/// pulling back short segments along the stable direction at `T^M p` for
/// increasing `M` until successive curves agree to `opts.hausdorff_tol`.
pub fn stable_curve(
    p: &FlatPoint,
    cfg: &PlumbingConfig,
    profile: &TwistProfile,
    opts: &StableCurveOptions,
) -> Result<StableLeafSample> {
    let est = stable_direction_with(p, cfg, profile, opts.direction_steps, Dynamics::Forward, HYPERBOLICITY_THRESHOLD)?;
    build_curve(p, est, cfg, profile, Dynamics::Forward, opts, true)
}

/// As [`stable_curve`], with the stable direction at `p` supplied and
/// transported along the orbit by the derivative.
pub fn stable_curve_along(
    p: &FlatPoint,
    direction: [f64; 2],
    cfg: &PlumbingConfig,
    profile: &TwistProfile,
    dynamics: Dynamics,
    opts: &StableCurveOptions,
) -> Result<StableLeafSample> {
    let est = DirectionEstimate { direction: canonical_sign(direction), chi: f64::NAN, log_gap: f64::NAN };
    build_curve(p, est, cfg, profile, dynamics, opts, false)
}

const PULLBACK_SCHEDULE: [usize; 18] = [1, 2, 3, 4, 6, 8, 10, 12, 16, 20, 24, 28, 32, 40, 48, 64, 80, 100];

fn build_curve(
    p: &FlatPoint,
    est: DirectionEstimate,
    cfg: &PlumbingConfig,
    profile: &TwistProfile,
    dynamics: Dynamics,
    opts: &StableCurveOptions,
    recompute: bool,
) -> Result<StableLeafSample> {
    let s = cfg.surface();
    let p = s.canonical_form(p)?;
    let e = est.direction;
    let mut prev: Option<Pullback> = None;
    let mut last_change = f64::INFINITY;
    let mut used = 0;
    let mut converged = false;
    for &m in &PULLBACK_SCHEDULE {
        let rec = dynamics.cocycle(&p, cfg, profile, m);
        let q = rec.endpoint;
        let pushed = rec.cocycle.log_stretch(e);
        let eq = if recompute {
            match stable_direction_with(&q, cfg, profile, opts.direction_steps, dynamics, 0.0) {
                Ok(d) => d.direction,
                Err(_) => transported(&rec, e),
            }
        } else {
            transported(&rec, e)
        };
        // backward stretch of e_q is the reciprocal of the forward contraction of e
        let growth = (-pushed).exp();
        if growth > opts.max_expansion {
            break;
        }
        let eta = 0.75 * opts.arc_length / growth;
        let Some(curve) = pull_back_segment(&q, eq, eta, m, opts.arc_length, cfg, profile, dynamics, opts.max_points) else {
            continue;
        };
        used = m;
        if let Some(pr) = &prev {
            last_change = polyline_hausdorff(&s, &pr.polyline, &curve.polyline);
            prev = Some(curve);
            // Successive pullbacks agree trivially while the orbit sits in a
            // single shear region, so also ask for the seed segment to have
            // shrunk below the tolerance.
            if last_change < opts.hausdorff_tol && growth * opts.hausdorff_tol >= opts.arc_length {
                converged = true;
                break;
            }
        } else {
            prev = Some(curve);
        }
    }
    let curve = prev.ok_or_else(|| TwistError::NonHyperbolic("no pullback stayed on the surface".into()))?;
    let bi = curve.base_index;
    let tangent_error = if bi > 0 && bi + 1 < curve.polyline.len() {
        let (dx, dy) = s.displacement(&curve.polyline[bi - 1], &curve.polyline[bi + 1]);
        let n = dx.hypot(dy);
        ((dx * e[1] - dy * e[0]) / n).abs().asin()
    } else {
        f64::NAN
    };
    let mut sample = StableLeafSample {
        base: p,
        direction: e,
        chi: est.chi,
        polyline: curve.polyline,
        base_index: bi,
        pullback_steps: used,
        hausdorff_change: last_change,
        converged,
        tangent_error,
        contraction_rates: Vec::new(),
    };
    let d = sample.endpoint_distances(cfg, profile, CONTRACTION_STEPS);
    sample.contraction_rates = d.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(sample)
}

fn transported(rec: &CocycleRecord, e: [f64; 2]) -> [f64; 2] {
    let m = rec.cocycle.matrix();
    canonical_sign([m[0][0] * e[0] + m[0][1] * e[1], m[1][0] * e[0] + m[1][1] * e[1]])
}

/// A stable curve swept by the equator rotations.
#[derive(Debug, Clone)]
pub struct LiftedLeaf {
    pub leaf: LagrangianLeaf,
    pub omega_residual: f64,
    /// Per-step log contraction of the base curve endpoints.
    pub base_rate: f64,
    /// Per-step log contraction of the lifted endpoints, one per angle.
    pub leaf_rates: Vec<f64>,
    pub rate_mismatch: f64,
    pub steps: usize,
}

/// Lifts a stable curve into the plumbing, sweeps it by the rotations at
/// `thetas`, and compares endpoint contraction over `steps` iterates.
pub fn lift_stable_leaf(
    sample: &StableLeafSample,
    cfg: &PlumbingConfig,
    profile: &TwistProfile,
    thetas: &[EquatorAngle],
    steps: usize,
) -> Result<LiftedLeaf> {
    let curve = sample.polyline.iter().map(|q| lift_from_flat(q, cfg)).collect::<Result<Vec<_>>>()?;
    let leaf = lagrangian_leaf(&curve, thetas, false)?;
    let omega_residual = leaf.omega_residual()?;
    let d = sample.endpoint_distances(cfg, profile, steps);
    let k = steps.max(1) as f64;
    let base_rate = (d[steps] / d[0]).ln() / k;
    let mut leaf_rates = Vec::with_capacity(thetas.len());
    for row in &leaf.samples {
        let mut a = row[0].clone();
        let mut b = row[row.len() - 1].clone();
        let d0 = ambient_distance(&a, &b);
        for _ in 0..steps {
            a = composite_twist(&a, cfg, profile)?;
            b = composite_twist(&b, cfg, profile)?;
        }
        leaf_rates.push((ambient_distance(&a, &b) / d0).ln() / k);
    }
    let rate_mismatch = leaf_rates.iter().map(|r| (r - base_rate).abs()).fold(0.0, f64::max);
    Ok(LiftedLeaf { leaf, omega_residual, base_rate, leaf_rates, rate_mismatch, steps })
}
