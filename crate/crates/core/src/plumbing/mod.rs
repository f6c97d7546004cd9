//! The plumbing of `m` copies of T*S^n along a chain, composite Dehn twists
//! on it, the conjugacy with the flat band surface, and Lagrangian leaves.
//!
//! Sphere `i` meets sphere `i + 1` at its south pole and sphere `i - 1` at
//! its north pole. The gluing `psi_i` goes through the south chart of sphere
//! `i`, the swap `J(t, s) = (-s, t)` and the north chart of sphere `i + 1`.

mod chart;
mod leaf;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

pub use chart::{
    chart_backward, chart_forward, chart_inverse_jacobian, cometric_norm, cometric_norm_grad, ChartPoint, Pole,
};
pub use leaf::{lagrangian_leaf, sample_thetas, LagrangianLeaf};

use crate::error::{Result, TwistError};
use crate::linked_twist::{FlatPoint, FlatSurface};
use crate::twist_core::{dehn_twist, involution, rotation_map, EquatorAngle, SphereCotangentPoint, TwistProfile};

/// Chart radius of the gluing region, kept `0.1` inside the hemisphere.
pub const OVERLAP_RADIUS: f64 = FRAC_PI_2 - 0.1;

/// Tolerance on off-circle coordinates for membership in the invariant set.
pub const INVARIANT_SET_TOL: f64 = 1e-8;

/// Chain plumbing data: `m` spheres of dimension `n`, twist radius and exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlumbingConfig {
    m: usize,
    n: usize,
    epsilon: f64,
    exponents: Vec<i64>,
}

impl PlumbingConfig {
    pub fn new(m: usize, n: usize, epsilon: f64, exponents: Vec<i64>) -> Result<Self> {
        if m < 2 {
            return Err(TwistError::InvalidConfig(format!("m must be at least 2, got {m}")));
        }
        if n < 1 {
            return Err(TwistError::InvalidConfig("n must be at least 1".into()));
        }
        if m > 2 && n < 2 {
            return Err(TwistError::InvalidConfig("chains with m > 2 need n >= 2".into()));
        }
        if !(epsilon > 0.0 && epsilon < FRAC_PI_4) {
            return Err(TwistError::InvalidConfig(format!("epsilon {epsilon} outside (0, pi/4)")));
        }
        if exponents.len() != m {
            return Err(TwistError::InvalidConfig(format!(
                "expected {m} exponents, got {}",
                exponents.len()
            )));
        }
        Ok(Self { m, n, epsilon, exponents })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    /// True when `k_i k_{i+1} < 0` for every adjacent pair.
    pub fn co_rotating(&self) -> bool {
        self.exponents.windows(2).all(|w| w[0] * w[1] < 0)
    }

    /// The twist profile with this support radius.
    pub fn profile(&self) -> TwistProfile {
        TwistProfile::new(self.epsilon).expect("epsilon validated on construction")
    }

    pub fn surface(&self) -> FlatSurface {
        FlatSurface::new(self.m, self.epsilon).expect("validated on construction")
    }

    pub fn with_exponents(&self, exponents: Vec<i64>) -> Result<Self> {
        Self::new(self.m, self.n, self.epsilon, exponents)
    }
}

/// A point of the plumbing, stored on its owning sphere (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    pub sphere: usize,
    pub point: SphereCotangentPoint,
}

impl AmbientPoint {
    pub fn new(sphere: usize, point: SphereCotangentPoint) -> Self {
        Self { sphere, point }
    }
}

fn check_point(p: &AmbientPoint, cfg: &PlumbingConfig) -> Result<()> {
    if p.sphere < 1 || p.sphere > cfg.m {
        return Err(TwistError::InvalidConfig(format!("sphere index {} outside 1..={}", p.sphere, cfg.m)));
    }
    if p.point.dim() != cfg.n {
        return Err(TwistError::DimensionMismatch { expected: cfg.n, found: p.point.dim() });
    }
    Ok(())
}

fn in_gluing_region(c: &ChartPoint) -> bool {
    c.t.norm() < OVERLAP_RADIUS && c.s.norm() < OVERLAP_RADIUS
}

/// `psi`: from the south chart of one sphere to the north chart of the next.
fn psi_forward(p: &SphereCotangentPoint, strict: bool) -> Option<SphereCotangentPoint> {
    let c = chart_forward(p, Pole::South).ok()?;
    if strict && !in_gluing_region(&c) {
        return None;
    }
    let swapped = ChartPoint { t: -&c.s, s: c.t };
    chart_backward(&swapped, Pole::North).ok()
}

/// `psi^{-1}`: from the north chart of one sphere to the south chart of the previous.
fn psi_backward(p: &SphereCotangentPoint, strict: bool) -> Option<SphereCotangentPoint> {
    let c = chart_forward(p, Pole::North).ok()?;
    if strict && !in_gluing_region(&c) {
        return None;
    }
    let swapped = ChartPoint { t: c.s, s: -&c.t };
    chart_backward(&swapped, Pole::South).ok()
}

/// True when the point lies in the gluing region around `pole`.
pub fn in_overlap(p: &SphereCotangentPoint, pole: Pole) -> bool {
    chart_forward(p, pole).map(|c| in_gluing_region(&c)).unwrap_or(false)
}

/// Moves a point across the gluing it lies in: from the south region of
/// sphere `i` to sphere `i + 1`, or from the north region to sphere `i - 1`.
/// Applying it twice returns the original point.
pub fn transition(p: &AmbientPoint, cfg: &PlumbingConfig) -> Result<AmbientPoint> {
    check_point(p, cfg)?;
    let i = p.sphere;
    let n = cfg.n;
    if p.point.x()[n] < 0.0 {
        if i < cfg.m {
            if let Some(q) = psi_forward(&p.point, true) {
                return Ok(AmbientPoint::new(i + 1, q));
            }
        }
        Err(TwistError::OutsideOverlap(i, i + 1))
    } else {
        if i > 1 {
            if let Some(q) = psi_backward(&p.point, true) {
                return Ok(AmbientPoint::new(i - 1, q));
            }
        }
        Err(TwistError::OutsideOverlap(i - 1, i))
    }
}

/// Moves the point to the lowest-index sphere on which it is represented.
pub fn canonicalize(p: AmbientPoint) -> AmbientPoint {
    if p.sphere > 1 {
        if let Some(q) = psi_backward(&p.point, true) {
            return AmbientPoint::new(p.sphere - 1, q);
        }
    }
    p
}

/// Coordinates of `p` on sphere `j`, when `p` is representable there.
/// With `strict`, only the gluing region counts; otherwise the whole chart
/// hemisphere is used, which is what distance comparisons need.
pub fn represent_on(p: &AmbientPoint, j: usize, strict: bool) -> Option<SphereCotangentPoint> {
    if j == p.sphere {
        Some(p.point.clone())
    } else if j == p.sphere + 1 {
        psi_forward(&p.point, strict)
    } else if j + 1 == p.sphere {
        psi_backward(&p.point, strict)
    } else {
        None
    }
}

/// Max-norm distance after moving both points to a common sphere;
/// infinite when they share no chart.
pub fn ambient_distance(a: &AmbientPoint, b: &AmbientPoint) -> f64 {
    match represent_on(b, a.sphere, false) {
        Some(q) => a.point.distance(&q),
        None => f64::INFINITY,
    }
}

/// `tau_j^power` on the plumbing, on a canonical point.
pub fn apply_twist_factor(p: &AmbientPoint, j: usize, power: i64, profile: &TwistProfile) -> AmbientPoint {
    if power == 0 {
        return p.clone();
    }
    if p.sphere == j {
        return canonicalize(AmbientPoint::new(j, dehn_twist(&p.point, profile, power)));
    }
    if p.sphere + 1 == j {
        if let Some(q) = psi_forward(&p.point, true) {
            if q.covector_norm() >= profile.epsilon() {
                return p.clone();
            }
            return canonicalize(AmbientPoint::new(j, dehn_twist(&q, profile, power)));
        }
    }
    p.clone()
}

/// `tau_1^{k_1} ... tau_m^{k_m}`, applying `tau_m^{k_m}` first.
pub fn composite_twist(p: &AmbientPoint, cfg: &PlumbingConfig, profile: &TwistProfile) -> Result<AmbientPoint> {
    check_point(p, cfg)?;
    let mut q = canonicalize(p.clone());
    for j in (1..=cfg.m).rev() {
        q = apply_twist_factor(&q, j, cfg.exponents[j - 1], profile);
    }
    Ok(q)
}

/// Inverse of [`composite_twist`].
pub fn composite_twist_inverse(p: &AmbientPoint, cfg: &PlumbingConfig, profile: &TwistProfile) -> Result<AmbientPoint> {
    check_point(p, cfg)?;
    let mut q = canonicalize(p.clone());
    for j in 1..=cfg.m {
        q = apply_twist_factor(&q, j, -cfg.exponents[j - 1], profile);
    }
    Ok(q)
}

/// The involution applied sphere by sphere; it commutes with every gluing.
pub fn involution_global(p: &AmbientPoint) -> AmbientPoint {
    AmbientPoint::new(p.sphere, involution(&p.point))
}

/// The rotation map on the owning sphere. The point must lie on the
/// great-circle bundle of that sphere.
pub fn rotation_global(p: &AmbientPoint, theta: &EquatorAngle) -> Result<AmbientPoint> {
    Ok(AmbientPoint::new(p.sphere, rotation_map(&p.point, theta)?))
}

pub fn reflection_global(p: &AmbientPoint) -> Result<AmbientPoint> {
    rotation_global(p, &EquatorAngle::reflection(p.point.dim()))
}

/// True when the point lies on the union of the great-circle bundles.
pub fn in_invariant_set(p: &AmbientPoint) -> bool {
    p.point.off_circle_residual() < INVARIANT_SET_TOL
}

/// Orientation sign of the identification of sphere `i` with its band.
fn band_sign(i: usize) -> f64 {
    if i % 4 == 0 || i % 4 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `(angle from the south pole, fiber coordinate)` on sphere `band` of a
/// flat point lying in that band's strip.
pub fn flat_to_circle(surface: &FlatSurface, band: usize, x: f64, y: f64) -> (f64, f64) {
    let sg = band_sign(band);
    if band % 2 == 1 {
        let c = surface.center(band);
        (sg * (x - c), sg * (y - c))
    } else {
        let b = (band / 2) as f64;
        (-sg * (y - b * PI), sg * (x - surface.center(band)))
    }
}

/// Inverse of [`flat_to_circle`], up to the end gluing along the band.
pub fn circle_to_flat(surface: &FlatSurface, band: usize, alpha: f64, s: f64) -> (f64, f64) {
    let sg = band_sign(band);
    let lo = surface.along_start(band);
    let wrap = |v: f64| {
        let w = lo + (v - lo).rem_euclid(2.0 * PI);
        if w >= lo + 2.0 * PI {
            lo
        } else {
            w
        }
    };
    if band % 2 == 1 {
        let c = surface.center(band);
        (wrap(c + sg * alpha), c + sg * s)
    } else {
        let b = (band / 2) as f64;
        (surface.center(band) + sg * s, wrap(b * PI - sg * alpha))
    }
}

/// The conjugacy from the band surface to the invariant set of the plumbing.
pub fn lift_from_flat(q: &FlatPoint, cfg: &PlumbingConfig) -> Result<AmbientPoint> {
    let surface = cfg.surface();
    let q = surface.canonical_form(q)?;
    let band = q.band.ok_or(TwistError::OutsideSurface)?;
    let (alpha, s) = flat_to_circle(&surface, band, q.x, q.y);
    Ok(canonicalize(AmbientPoint::new(band, SphereCotangentPoint::on_great_circle(cfg.n, alpha, s))))
}

/// Inverse of [`lift_from_flat`].
pub fn reduce_to_flat(p: &AmbientPoint, cfg: &PlumbingConfig) -> Result<FlatPoint> {
    check_point(p, cfg)?;
    let r = p.point.off_circle_residual();
    if r >= INVARIANT_SET_TOL {
        return Err(TwistError::OffGreatCircle(r));
    }
    let surface = cfg.surface();
    let (alpha, s) = p.point.great_circle_coords();
    let (x, y) = circle_to_flat(&surface, p.sphere, alpha, s);
    surface.canonical_form(&FlatPoint::new(x, y))
}

/// A flat point together with its image in the plumbing.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatLift {
    pub flat: FlatPoint,
    pub ambient: AmbientPoint,
}

impl FlatLift {
    pub fn new(flat: &FlatPoint, cfg: &PlumbingConfig) -> Result<Self> {
        let flat = cfg.surface().canonical_form(flat)?;
        let ambient = lift_from_flat(&flat, cfg)?;
        Ok(Self { flat, ambient })
    }
}
