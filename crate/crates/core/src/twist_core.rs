//! Model geometry on T*S^n: the twist profile, the model Dehn twist, the
//! circle action, rotation maps, the involution, and numerical differentials.
//!
//! Points of T*S^n are stored in ambient coordinates `(x, v)` with `|x| = 1`
//! and `<x, v> = 0`. Index `0` is `x_1`, indices `1..n` are the off-circle
//! coordinates and index `n` is `x_{n+1}`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwistError};
use crate::linalg::{orthogonal_complement, pfaffian};

/// Tolerance for the cotangent constraint after re-projection.
pub const CONSTRAINT_TOL: f64 = 1e-9;

/// Finite-difference step used by [`twist_jacobian`].
pub const JACOBIAN_STEP: f64 = 1e-6;

/// Smooth step on `[0, 1]`, flat to all orders at both ends, with `S(1/2) = 1/2`.
fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + (1.0 / u - 1.0 / (1.0 - u)).exp())
    }
}

fn smooth_step_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let s = smooth_step(u);
    let w = 1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u));
    s * (1.0 - s) * w
}

/// The angle function `r` of the model twist.
///
/// `r` equals `pi` at the origin, decreases to `0` at `t = epsilon`, vanishes
/// beyond and satisfies `r(-t) + r(t) = 2 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistProfile {
    epsilon: f64,
}

impl TwistProfile {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(TwistError::InvalidEpsilon(epsilon));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t >= self.epsilon {
            0.0
        } else if t <= -self.epsilon {
            2.0 * PI
        } else {
            let s = smooth_step(t.abs() / self.epsilon);
            if t >= 0.0 {
                PI * (1.0 - s)
            } else {
                PI * (1.0 + s)
            }
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        if t.abs() >= self.epsilon {
            return 0.0;
        }
        -PI / self.epsilon * smooth_step_deriv(t.abs() / self.epsilon)
    }

    /// `(r(t), r'(t))` sharing one exponential.
    #[inline]
    pub fn eval_with_deriv(&self, t: f64) -> (f64, f64) {
        let a = t.abs();
        if a >= self.epsilon {
            return (if t > 0.0 { 0.0 } else { 2.0 * PI }, 0.0);
        }
        let u = a / self.epsilon;
        if u == 0.0 {
            return (PI, 0.0);
        }
        let s = 1.0 / (1.0 + (1.0 / u - 1.0 / (1.0 - u)).exp());
        let w = 1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u));
        let d = -PI / self.epsilon * s * (1.0 - s) * w;
        let r = if t >= 0.0 { PI * (1.0 - s) } else { PI * (1.0 + s) };
        (r, d)
    }

    /// Largest slope `max |r'| = 2 pi / epsilon`, attained at `|t| = epsilon / 2`.
    pub fn max_slope(&self) -> f64 {
        2.0 * PI / self.epsilon
    }

    /// The unique `t` in `(0, epsilon)` with `r(t) = angle`, for `angle` in `(0, pi)`.
    pub fn inverse(&self, angle: f64) -> Option<f64> {
        if !(angle > 0.0 && angle < PI) {
            return None;
        }
        let (mut lo, mut hi) = (0.0, self.epsilon);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) > angle {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-17 {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Builds the standard profile with support radius `epsilon`.
pub fn make_profile(epsilon: f64) -> Result<TwistProfile> {
    TwistProfile::new(epsilon)
}

/// A point of T*S^n in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereCotangentPoint {
    x: DVector<f64>,
    v: DVector<f64>,
}

impl SphereCotangentPoint {
    /// Checked constructor; the constraint must already hold within [`CONSTRAINT_TOL`].
    pub fn new(x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let p = Self::raw(x, v)?;
        let (a, b) = p.constraint_residual();
        if a > CONSTRAINT_TOL || b > CONSTRAINT_TOL {
            return Err(TwistError::OffConstraint { norm: a, dot: b });
        }
        Ok(p)
    }

    /// Constructor that projects onto the constraint manifold.
    pub fn projected(x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let mut p = Self::raw(x, v)?;
        if p.x.norm() == 0.0 {
            return Err(TwistError::ZeroVector);
        }
        p.reproject();
        Ok(p)
    }

    fn raw(x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if x.len() < 2 {
            return Err(TwistError::DimensionMismatch { expected: 2, found: x.len() });
        }
        if v.len() != x.len() {
            return Err(TwistError::DimensionMismatch { expected: x.len(), found: v.len() });
        }
        Ok(Self { x: DVector::from_vec(x), v: DVector::from_vec(v) })
    }

    pub(crate) fn from_vectors(x: DVector<f64>, v: DVector<f64>) -> Self {
        debug_assert_eq!(x.len(), v.len());
        Self { x, v }
    }

    /// Point `(sin a, 0.., -cos a ; s cos a, 0.., s sin a)` of T*gamma, where
    /// `a` is the angle from the south pole along the reference great circle.
    pub fn on_great_circle(n: usize, alpha: f64, s: f64) -> Self {
        let (sa, ca) = alpha.sin_cos();
        let mut x = DVector::zeros(n + 1);
        let mut v = DVector::zeros(n + 1);
        x[0] = sa;
        x[n] = -ca;
        v[0] = s * ca;
        v[n] = s * sa;
        Self { x, v }
    }

    pub fn south_pole(n: usize) -> Self {
        Self::on_great_circle(n, 0.0, 0.0)
    }

    pub fn north_pole(n: usize) -> Self {
        let mut p = Self::on_great_circle(n, PI, 0.0);
        p.x[0] = 0.0;
        p
    }

    /// Sphere dimension `n`.
    pub fn dim(&self) -> usize {
        self.x.len() - 1
    }

    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn v(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn covector_norm(&self) -> f64 {
        self.v.norm()
    }

    /// `(| |x|^2 - 1 |, |<x, v>|)`.
    pub fn constraint_residual(&self) -> (f64, f64) {
        ((self.x.norm_squared() - 1.0).abs(), self.x.dot(&self.v).abs())
    }

    /// Normalizes `x` and removes the `x` component of `v`.
    pub fn reproject(&mut self) {
        let nx = self.x.norm();
        self.x /= nx;
        let d = self.x.dot(&self.v);
        self.v.axpy(-d, &self.x, 1.0);
    }

    /// Largest absolute off-circle coordinate (indices `1..n` of `x` and `v`).
    pub fn off_circle_residual(&self) -> f64 {
        let n = self.dim();
        (1..n).fold(0.0f64, |m, i| m.max(self.x[i].abs()).max(self.v[i].abs()))
    }

    /// Angle from the south pole and signed fiber coordinate on T*gamma.
    /// Off-circle coordinates are ignored.
    pub fn great_circle_coords(&self) -> (f64, f64) {
        let n = self.dim();
        let alpha = self.x[0].atan2(-self.x[n]);
        let (sa, ca) = alpha.sin_cos();
        (alpha, self.v[0] * ca + self.v[n] * sa)
    }

    /// Stacked ambient vector `(x, v)` of length `2n + 2`.
    pub fn to_vector(&self) -> DVector<f64> {
        let k = self.x.len();
        DVector::from_fn(2 * k, |i, _| if i < k { self.x[i] } else { self.v[i - k] })
    }

    /// Max-norm distance between the stacked coordinates.
    pub fn distance(&self, other: &Self) -> f64 {
        let dx = (&self.x - &other.x).amax();
        let dv = (&self.v - &other.v).amax();
        dx.max(dv)
    }

    /// Random point with uniformly distributed base and a Gaussian covector
    /// scaled to norm `scale * U(0,1)`.
    pub fn random<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> Self {
        let x: DVector<f64> = DVector::from_fn(n + 1, |_, _| rng.sample(StandardNormal));
        let x = &x / x.norm();
        let mut v: DVector<f64> = DVector::from_fn(n + 1, |_, _| rng.sample(StandardNormal));
        let d = x.dot(&v);
        v.axpy(-d, &x, 1.0);
        let nv = v.norm();
        let target = scale * rng.gen::<f64>();
        if nv > 0.0 {
            v *= target / nv;
        }
        Self { x, v }
    }
}

/// A point of the equator S^{n-1}, the parameter of the rotation map.
#[derive(Debug, Clone, PartialEq)]
pub struct EquatorAngle {
    theta: DVector<f64>,
}

impl EquatorAngle {
    /// Normalizes the given vector.
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        let t = DVector::from_vec(theta);
        let nt = t.norm();
        if !(nt > 0.0) || !nt.is_finite() {
            return Err(TwistError::ZeroVector);
        }
        Ok(Self { theta: t / nt })
    }

    /// The reference angle `(1, 0, ..., 0)`, which fixes T*gamma.
    pub fn reference(n: usize) -> Self {
        let mut t = DVector::zeros(n);
        t[0] = 1.0;
        Self { theta: t }
    }

    /// `(-1, 0, ..., 0)`, the angle of the reflection map.
    pub fn reflection(n: usize) -> Self {
        let mut t = DVector::zeros(n);
        t[0] = -1.0;
        Self { theta: t }
    }

    /// Uniform sample of S^{n-1} by normalized Gaussian draws.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let t: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(a) = Self::new(t) {
                return a;
            }
        }
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }
}

fn circle_action_raw(x: &DVector<f64>, v: &DVector<f64>, angle: f64) -> (DVector<f64>, DVector<f64>) {
    let nv = v.norm();
    let (s, c) = angle.sin_cos();
    let xn = x * c + v * (s / nv);
    let vn = x * (-s * nv) + v * c;
    (xn, vn)
}

/// Rotates `(x, v)` along the geodesic flow of the unit cotangent sphere by `angle`.
pub fn circle_action(p: &SphereCotangentPoint, angle: f64) -> Result<SphereCotangentPoint> {
    if p.v.norm() == 0.0 {
        return Err(TwistError::ZeroCovector);
    }
    let (x, v) = circle_action_raw(&p.x, &p.v, angle);
    let mut q = SphereCotangentPoint { x, v };
    q.reproject();
    Ok(q)
}

/// The model Dehn twist `tau^power`.
pub fn dehn_twist(p: &SphereCotangentPoint, profile: &TwistProfile, power: i64) -> SphereCotangentPoint {
    let nv = p.v.norm();
    if nv == 0.0 {
        let sign = if power.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        return SphereCotangentPoint { x: &p.x * sign, v: p.v.clone() };
    }
    if power == 0 || nv >= profile.epsilon() {
        return p.clone();
    }
    let angle = power as f64 * profile.eval(nv);
    let (x, v) = circle_action_raw(&p.x, &p.v, angle);
    let mut q = SphereCotangentPoint { x, v };
    q.reproject();
    q
}

/// Twist formula evaluated on arbitrary ambient vectors, without projection.
fn dehn_twist_ambient(z: &DVector<f64>, profile: &TwistProfile, power: i64) -> DVector<f64> {
    let k = z.len() / 2;
    let x = z.rows(0, k).into_owned();
    let v = z.rows(k, k).into_owned();
    let angle = power as f64 * profile.eval(v.norm());
    let (xn, vn) = circle_action_raw(&x, &v, angle);
    DVector::from_fn(2 * k, |i, _| if i < k { xn[i] } else { vn[i - k] })
}

fn check_on_circle(p: &SphereCotangentPoint) -> Result<()> {
    let r = p.off_circle_residual();
    if r > CONSTRAINT_TOL {
        return Err(TwistError::OffGreatCircle(r));
    }
    Ok(())
}

/// The rotation map on T*gamma: moves the `e_1` component onto `theta`.
pub fn rotation_map(p: &SphereCotangentPoint, theta: &EquatorAngle) -> Result<SphereCotangentPoint> {
    let n = p.dim();
    if theta.dim() != n {
        return Err(TwistError::DimensionMismatch { expected: n, found: theta.dim() });
    }
    check_on_circle(p)?;
    let mut x = DVector::zeros(n + 1);
    let mut v = DVector::zeros(n + 1);
    for i in 0..n {
        x[i] = p.x[0] * theta.theta[i];
        v[i] = p.v[0] * theta.theta[i];
    }
    x[n] = p.x[n];
    v[n] = p.v[n];
    Ok(SphereCotangentPoint { x, v })
}

/// The reflection map, i.e. the rotation map at `(-1, 0, ..., 0)`.
pub fn reflection_map(p: &SphereCotangentPoint) -> Result<SphereCotangentPoint> {
    rotation_map(p, &EquatorAngle::reflection(p.dim()))
}

/// Negates the off-circle coordinates of `x` and `v`.
pub fn involution(p: &SphereCotangentPoint) -> SphereCotangentPoint {
    let n = p.dim();
    let mut q = p.clone();
    for i in 1..n {
        q.x[i] = -q.x[i];
        q.v[i] = -q.v[i];
    }
    q
}

/// `omega((a, b), (a', b')) = <a, b'> - <b, a'>` on stacked ambient tangent vectors.
pub fn symplectic_form(u: &DVector<f64>, w: &DVector<f64>) -> f64 {
    let k = u.len() / 2;
    let mut s = 0.0;
    for i in 0..k {
        s += u[i] * w[k + i] - u[k + i] * w[i];
    }
    s
}

/// Orthonormal basis (as columns) of the constraint tangent space
/// `{(a, b) : <x, a> = 0, <a, v> + <x, b> = 0}`.
pub fn tangent_basis(p: &SphereCotangentPoint) -> DMatrix<f64> {
    let k = p.x.len();
    let g1 = DVector::from_fn(2 * k, |i, _| if i < k { p.x[i] } else { 0.0 });
    let g2 = DVector::from_fn(2 * k, |i, _| if i < k { p.v[i] } else { p.x[i - k] });
    orthogonal_complement(&[g1, g2], 2 * k)
}

/// Orthogonal projection of an ambient vector onto the constraint tangent space.
pub fn project_to_tangent(p: &SphereCotangentPoint, w: &DVector<f64>) -> DVector<f64> {
    let b = tangent_basis(p);
    &b * (b.transpose() * w)
}

/// Tangent of the circle orbit through `p`: `(v/|v|, -|v| x)`.
pub fn circle_orbit_tangent(p: &SphereCotangentPoint) -> Result<DVector<f64>> {
    let nv = p.v.norm();
    if nv == 0.0 {
        return Err(TwistError::ZeroCovector);
    }
    let k = p.x.len();
    Ok(DVector::from_fn(2 * k, |i, _| if i < k { p.v[i] / nv } else { -nv * p.x[i - k] }))
}

/// Central finite-difference Jacobian of the twist in ambient coordinates,
/// with every column projected onto the tangent space at the image point.
pub fn twist_jacobian(p: &SphereCotangentPoint, profile: &TwistProfile, power: i64) -> Result<DMatrix<f64>> {
    if p.v.norm() == 0.0 {
        return Err(TwistError::ZeroCovector);
    }
    let z = p.to_vector();
    let dim = z.len();
    let image = dehn_twist(p, profile, power);
    let basis = tangent_basis(&image);
    let proj = &basis * basis.transpose();
    let h = JACOBIAN_STEP;
    let mut jac = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut zp = z.clone();
        let mut zm = z.clone();
        zp[j] += h;
        zm[j] -= h;
        let col = (dehn_twist_ambient(&zp, profile, power) - dehn_twist_ambient(&zm, profile, power)) / (2.0 * h);
        jac.set_column(j, &(&proj * col));
    }
    Ok(jac)
}

/// Ratio of symplectic volumes `Pf(D^T omega D) / Pf(omega)` over a tangent
/// basis at `p`; equals the determinant of `jac` restricted to the tangent
/// space when `jac` maps it symplectically.
pub fn restricted_symplectic_determinant(jac: &DMatrix<f64>, p: &SphereCotangentPoint) -> f64 {
    let b = tangent_basis(p);
    let db = jac * &b;
    let k = b.ncols();
    let gram = |m: &DMatrix<f64>| {
        DMatrix::from_fn(k, k, |i, j| symplectic_form(&m.column(i).into_owned(), &m.column(j).into_owned()))
    };
    pfaffian(&gram(&db)) / pfaffian(&gram(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn profile_values() {
        let r = make_profile(0.1).unwrap();
        assert_eq!(r.eval(0.0), PI);
        assert_eq!(r.eval(0.1), 0.0);
        assert_eq!(r.eval(0.2), 0.0);
        assert!((r.eval(-0.05) + r.eval(0.05) - 2.0 * PI).abs() < 1e-12);
        assert_eq!(r.deriv(0.0), 0.0);
        assert!(make_profile(0.0).is_err());
        assert!(make_profile(1.0).is_err());
        assert!(make_profile(f64::NAN).is_err());
    }

    #[test]
    fn profile_symmetry_on_grid() {
        let r = make_profile(0.3).unwrap();
        for i in 0..=1000 {
            let t = -0.5 + i as f64 * 1e-3;
            assert!((r.eval(-t) + r.eval(t) - 2.0 * PI).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn profile_derivative_matches_differences() {
        let r = make_profile(0.1).unwrap();
        for i in 1..200 {
            let t = -0.1 + i as f64 * 1e-3;
            let h = 1e-6;
            let fd = (r.eval(t + h) - r.eval(t - h)) / (2.0 * h);
            let (val, d) = r.eval_with_deriv(t);
            assert!((val - r.eval(t)).abs() < 1e-15);
            assert!((d - r.deriv(t)).abs() < 1e-12 * r.max_slope());
            assert!((fd - d).abs() < 1e-6 * r.max_slope(), "t={t} fd={fd} d={d}");
            assert!(d <= 0.0);
            if t.abs() > 0.01 && t.abs() < 0.09 {
                assert!(d < 0.0);
            }
        }
        assert!((r.deriv(0.05) + r.max_slope()).abs() < 1e-9);
    }

    #[test]
    fn profile_inverse() {
        let r = make_profile(0.1).unwrap();
        let t = r.inverse(2.0 * PI / 3.0).unwrap();
        assert!((r.eval(t) - 2.0 * PI / 3.0).abs() < 1e-13);
        assert!(r.inverse(PI).is_none());
    }

    #[test]
    fn circle_action_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = SphereCotangentPoint::random(3, 0.5, &mut rng);
        assert!(circle_action(&p, 0.0).unwrap().distance(&p) < 1e-15);
        assert!(circle_action(&p, 2.0 * PI).unwrap().distance(&p) < 1e-9);
        let q = circle_action(&p, 1.234).unwrap();
        assert!((q.covector_norm() - p.covector_norm()).abs() < 1e-12);
        let z = SphereCotangentPoint::south_pole(2);
        assert_eq!(circle_action(&z, 1.0), Err(TwistError::ZeroCovector));
    }

    #[test]
    fn twist_examples() {
        let r = make_profile(0.1).unwrap();
        let p = SphereCotangentPoint::new(vec![0.6, 0.0, 0.8], vec![0.0; 3]).unwrap();
        let q = dehn_twist(&p, &r, 1);
        assert_eq!(q.x().as_slice(), &[-0.6, -0.0, -0.8]);
        let far = SphereCotangentPoint::on_great_circle(2, 0.4, 0.2);
        assert_eq!(dehn_twist(&far, &r, 3), far);
        let near = SphereCotangentPoint::on_great_circle(2, 0.4, 0.03);
        let back = dehn_twist(&dehn_twist(&near, &r, 1), &r, -1);
        assert!(back.distance(&near) < 1e-9);
    }

    #[test]
    fn twist_on_circle_shifts_angle() {
        let r = make_profile(0.1).unwrap();
        for &s in &[0.03, -0.04, 0.07] {
            let p = SphereCotangentPoint::on_great_circle(3, 0.3, s);
            let q = dehn_twist(&p, &r, 2);
            let e = SphereCotangentPoint::on_great_circle(3, 0.3 + 2.0 * r.eval(s), s);
            assert!(q.distance(&e) < 1e-12);
        }
    }

    #[test]
    fn rotation_examples() {
        let theta = EquatorAngle::new(vec![0.3, -0.4, 1.2]).unwrap();
        let pole = SphereCotangentPoint::north_pole(3);
        assert!(rotation_map(&pole, &theta).unwrap().distance(&pole) < 1e-15);
        let p = SphereCotangentPoint::on_great_circle(3, 1.1, 0.2);
        assert_eq!(rotation_map(&p, &EquatorAngle::reference(3)).unwrap(), p);
        let off = SphereCotangentPoint::projected(vec![0.1, 0.5, 0.0, -0.8], vec![0.0; 4]).unwrap();
        assert!(matches!(rotation_map(&off, &theta), Err(TwistError::OffGreatCircle(_))));
    }

    #[test]
    fn involution_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = SphereCotangentPoint::random(3, 0.2, &mut rng);
        assert_eq!(involution(&involution(&p)), p);
        let c = SphereCotangentPoint::on_great_circle(3, 2.0, -0.1);
        assert_eq!(involution(&c), c);
    }

    #[test]
    fn jacobian_identity_outside_support() {
        let r = make_profile(0.1).unwrap();
        let p = SphereCotangentPoint::on_great_circle(2, 0.7, 0.5);
        let j = twist_jacobian(&p, &r, 1).unwrap();
        // the identity restricted to the tangent space is the tangent projector
        let b = tangent_basis(&p);
        let proj = &b * b.transpose();
        assert!((j - proj).amax() < 1e-6);
    }

    #[test]
    fn jacobian_rejects_zero_section() {
        let r = make_profile(0.1).unwrap();
        let p = SphereCotangentPoint::south_pole(2);
        assert_eq!(twist_jacobian(&p, &r, 1), Err(TwistError::ZeroCovector));
    }

    #[test]
    fn jacobian_preserves_symplectic_volume() {
        let r = make_profile(0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = SphereCotangentPoint::random(2, 0.1, &mut rng);
            let j = twist_jacobian(&p, &r, 1).unwrap();
            let d = restricted_symplectic_determinant(&j, &p);
            assert!((d - 1.0).abs() < 1e-5, "det = {d}");
        }
    }

    #[test]
    fn jacobian_on_orbit_tangent_matches_directional_difference() {
        let r = make_profile(0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let p = SphereCotangentPoint::random(3, 0.1, &mut rng);
            let j = twist_jacobian(&p, &r, 2).unwrap();
            let x = circle_orbit_tangent(&p).unwrap();
            let h = 1e-6;
            let fp = dehn_twist(&circle_action(&p, h).unwrap(), &r, 2).to_vector();
            let fm = dehn_twist(&circle_action(&p, -h).unwrap(), &r, 2).to_vector();
            let oracle = (fp - fm) / (2.0 * h);
            assert!((&j * &x - oracle).amax() < 1e-5);
        }
    }
}
