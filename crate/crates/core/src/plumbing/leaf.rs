//! Lagrangian leaves swept out by rotating a curve of the invariant set.

use nalgebra::DVector;
use rand::Rng;

use super::{ambient_distance, reflection_global, represent_on, AmbientPoint};
use crate::error::{Result, TwistError};
use crate::twist_core::{rotation_map, symplectic_form, EquatorAngle, CONSTRAINT_TOL};

/// Step used for tangent directions along the equator.
const THETA_STEP: f64 = 1e-4;

/// Samples `{R_theta(c(t_i))}` indexed as `samples[theta][i]`.
#[derive(Debug, Clone)]
pub struct LagrangianLeaf {
    pub curve: Vec<AmbientPoint>,
    pub thetas: Vec<EquatorAngle>,
    pub samples: Vec<Vec<AmbientPoint>>,
    pub closed: bool,
}

/// `count` equator angles drawn by normalized Gaussian sampling.
pub fn sample_thetas<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<EquatorAngle> {
    (0..count).map(|_| EquatorAngle::random(n, rng)).collect()
}

/// Distance from `p` to the polyline through `curve`, measured segment by segment.
fn distance_to_polyline(p: &AmbientPoint, curve: &[AmbientPoint], closed: bool) -> f64 {
    let mut best = f64::INFINITY;
    let count = curve.len();
    let segments = if closed { count } else { count.saturating_sub(1) };
    for i in 0..segments {
        let a = &curve[i];
        let b = &curve[(i + 1) % count];
        let (Some(pa), Some(pb)) = (represent_on(p, a.sphere, false), represent_on(b, a.sphere, false)) else {
            continue;
        };
        let za = a.point.to_vector();
        let zb = pb.to_vector();
        let zp = pa.to_vector();
        let d = &zb - &za;
        let len2 = d.norm_squared();
        let t = if len2 > 0.0 { ((&zp - &za).dot(&d) / len2).clamp(0.0, 1.0) } else { 0.0 };
        best = best.min((&zp - (&za + d * t)).amax());
    }
    best
}

/// Checks that a closed curve is carried to itself by the reflection map.
fn check_admissible(curve: &[AmbientPoint]) -> Result<()> {
    let spacing = curve
        .windows(2)
        .map(|w| ambient_distance(&w[0], &w[1]))
        .fold(0.0f64, f64::max);
    let tol = spacing * spacing + 1e-9;
    for (i, p) in curve.iter().enumerate() {
        let r = reflection_global(p)?;
        let d = distance_to_polyline(&r, curve, true);
        if d > tol {
            return Err(TwistError::NonAdmissibleCurve(format!(
                "reflection of sample {i} lies {d:e} from the curve (tolerance {tol:e})"
            )));
        }
    }
    Ok(())
}

/// Sweeps the curve `c` (points of the great-circle bundles) by the rotation
/// maps at the given angles. A closed leaf requires the curve to be invariant
/// under the reflection map.
pub fn lagrangian_leaf(curve: &[AmbientPoint], thetas: &[EquatorAngle], closed: bool) -> Result<LagrangianLeaf> {
    if curve.len() < 3 {
        return Err(TwistError::NonAdmissibleCurve("need at least three curve samples".into()));
    }
    let n = curve[0].point.dim();
    let last = curve.len() - 1;
    for (i, p) in curve.iter().enumerate() {
        let r = p.point.off_circle_residual();
        if r > CONSTRAINT_TOL {
            return Err(TwistError::OffGreatCircle(r));
        }
        let interior = closed || (i != 0 && i != last);
        // R_theta collapses exactly at the poles of the zero section
        let radial = p.point.x()[0].abs() + p.point.v()[0].abs();
        if interior && radial < 1e-9 {
            return Err(TwistError::NonAdmissibleCurve(format!("interior sample {i} sits on a pole")));
        }
    }
    if closed {
        check_admissible(curve)?;
    }
    let mut samples = Vec::with_capacity(thetas.len());
    for th in thetas {
        if th.dim() != n {
            return Err(TwistError::DimensionMismatch { expected: n, found: th.dim() });
        }
        let row = curve
            .iter()
            .map(|p| Ok(AmbientPoint::new(p.sphere, rotation_map(&p.point, th)?)))
            .collect::<Result<Vec<_>>>()?;
        samples.push(row);
    }
    Ok(LagrangianLeaf { curve: curve.to_vec(), thetas: thetas.to_vec(), samples, closed })
}

/// Orthonormal basis of the complement of `theta` in R^n.
fn equator_tangents(theta: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = theta.len();
    let mut out: Vec<DVector<f64>> = Vec::new();
    for e in 0..n {
        let mut w = DVector::zeros(n);
        w[e] = 1.0;
        for _ in 0..2 {
            let c = theta.dot(&w);
            w.axpy(-c, theta, 1.0);
            for b in &out {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        let nw = w.norm();
        if nw > 1e-8 {
            out.push(w / nw);
        }
        if out.len() + 1 == n {
            break;
        }
    }
    out
}

impl LagrangianLeaf {
    /// Largest normalized `|omega(u, w)| / (|u| |w|)` over the discrete
    /// tangent frames at interior samples. Curve tangents are central
    /// differences of neighbouring rotated samples; equator tangents are
    /// central differences in the angle.
    pub fn omega_residual(&self) -> Result<f64> {
        let count = self.curve.len();
        let mut worst = 0.0f64;
        for (ti, th) in self.thetas.iter().enumerate() {
            let row = &self.samples[ti];
            let range: Vec<usize> = if self.closed { (0..count).collect() } else { (1..count - 1).collect() };
            for i in range {
                let here = &row[i];
                let prev = &row[(i + count - 1) % count];
                let next = &row[(i + 1) % count];
                let (Some(a), Some(b)) = (represent_on(prev, here.sphere, false), represent_on(next, here.sphere, false))
                else {
                    continue;
                };
                let mut frame = vec![(b.to_vector() - a.to_vector()) * 0.5];
                let base = &self.curve[i];
                let base = represent_on(base, here.sphere, false).ok_or(TwistError::OutsideChart)?;
                for d in equator_tangents(th.theta()) {
                    let plus = EquatorAngle::new((th.theta() + &d * THETA_STEP).iter().copied().collect())?;
                    let minus = EquatorAngle::new((th.theta() - &d * THETA_STEP).iter().copied().collect())?;
                    let zp = rotation_map(&base, &plus)?.to_vector();
                    let zm = rotation_map(&base, &minus)?.to_vector();
                    frame.push((zp - zm) / (2.0 * THETA_STEP));
                }
                for a in 0..frame.len() {
                    for b in a + 1..frame.len() {
                        let (u, w) = (&frame[a], &frame[b]);
                        let scale = u.norm() * w.norm();
                        if scale > 0.0 {
                            worst = worst.max(symplectic_form(u, w).abs() / scale);
                        }
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Index-matched distance between two leaves sampled on the same grid,
    /// an upper bound for the Hausdorff distance of the sample clouds.
    pub fn cloud_distance(&self, other: &LagrangianLeaf) -> f64 {
        let mut worst = 0.0f64;
        for (ra, rb) in self.samples.iter().zip(&other.samples) {
            for (a, b) in ra.iter().zip(rb) {
                worst = worst.max(ambient_distance(a, b));
            }
        }
        worst
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, usize, &AmbientPoint)> {
        self.samples.iter().enumerate().flat_map(|(ti, row)| row.iter().enumerate().map(move |(i, p)| (ti, i, p)))
    }

    /// Applies a map to every sample.
    pub fn map_samples<F>(&self, mut f: F) -> Result<Vec<Vec<AmbientPoint>>>
    where
        F: FnMut(&AmbientPoint) -> Result<AmbientPoint>,
    {
        self.samples.iter().map(|row| row.iter().map(&mut f).collect()).collect()
    }
}
