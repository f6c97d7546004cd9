//! Normal-coordinate charts around the poles and their cotangent lifts.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwistError};
use crate::twist_core::SphereCotangentPoint;

/// Which pole a chart is centered at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pole {
    /// Centered at `(0, ..., 0, -1)`.
    South,
    /// Centered at `(0, ..., 0, 1)`.
    North,
}

impl Pole {
    pub fn sign(self) -> f64 {
        match self {
            Pole::South => -1.0,
            Pole::North => 1.0,
        }
    }
}

/// Base and fiber coordinates `(t, s)` of a cotangent chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub t: DVector<f64>,
    pub s: DVector<f64>,
}

impl ChartPoint {
    pub fn new(t: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        if t.len() != s.len() {
            return Err(TwistError::DimensionMismatch { expected: t.len(), found: s.len() });
        }
        Ok(Self { t: DVector::from_vec(t), s: DVector::from_vec(s) })
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.t - &other.t).amax().max((&self.s - &other.s).amax())
    }
}

/// `sin(r) / r`.
pub(crate) fn sinc(r: f64) -> f64 {
    if r < 1e-4 {
        1.0 - r * r / 6.0 + r.powi(4) / 120.0
    } else {
        r.sin() / r
    }
}

/// `(d/dr sinc(r)) / r = (r cos r - sin r) / r^3`.
fn sinc_slope_over_r(r: f64) -> f64 {
    if r < 1e-2 {
        let r2 = r * r;
        -1.0 / 3.0 + r2 / 30.0 - r2 * r2 / 840.0
    } else {
        (r * r.cos() - r.sin()) / (r * r * r)
    }
}

/// Jacobian `Dg(t)` of the inverse chart `g(t) = (sinc|t| t, -+cos|t|)`,
/// an `(n+1) x n` matrix.
pub fn chart_inverse_jacobian(t: &DVector<f64>, pole: Pole) -> DMatrix<f64> {
    let n = t.len();
    let r = t.norm();
    let c0 = sinc(r);
    let c1 = sinc_slope_over_r(r);
    let mut d = DMatrix::zeros(n + 1, n);
    for i in 0..n {
        for k in 0..n {
            d[(i, k)] = c1 * t[i] * t[k];
        }
        d[(i, i)] += c0;
    }
    // the last coordinate is -+cos|t|, whose gradient is +-sinc|t| t
    let last = -pole.sign();
    for k in 0..n {
        d[(n, k)] = last * c0 * t[k];
    }
    d
}

/// Inverse of the chart metric applied to a covector:
/// `q^2 s + (1 - q^2) <t^, s> t^` with `q = |t| / sin|t|`.
fn inverse_metric_apply(t: &DVector<f64>, s: &DVector<f64>) -> DVector<f64> {
    let r = t.norm();
    if r == 0.0 {
        return s.clone();
    }
    let q = 1.0 / sinc(r);
    let q2 = q * q;
    let th = t / r;
    let ps = th.dot(s);
    s * q2 + th * ((1.0 - q2) * ps)
}

/// Chart coordinates of a point in the hemisphere around `pole`.
pub fn chart_forward(p: &SphereCotangentPoint, pole: Pole) -> Result<ChartPoint> {
    let n = p.dim();
    let x = p.x();
    let height = pole.sign() * x[n];
    if !(height > 0.0) {
        return Err(TwistError::OutsideChart);
    }
    let head = x.rows(0, n).into_owned();
    let w = head.norm();
    // atan2 keeps full precision near the pole where arccos would not
    let r = w.atan2(height);
    let scale = if w > 0.0 { r / w } else { 1.0 };
    let t = head * scale;
    let s = chart_inverse_jacobian(&t, pole).transpose() * p.v();
    Ok(ChartPoint { t, s })
}

/// The point of T*S^n with the given chart coordinates.
pub fn chart_backward(c: &ChartPoint, pole: Pole) -> Result<SphereCotangentPoint> {
    let n = c.dim();
    let r = c.t.norm();
    if !(r < FRAC_PI_2) {
        return Err(TwistError::OutsideChart);
    }
    let c0 = sinc(r);
    let mut x = DVector::zeros(n + 1);
    for i in 0..n {
        x[i] = c0 * c.t[i];
    }
    x[n] = pole.sign() * r.cos();
    let v = chart_inverse_jacobian(&c.t, pole) * inverse_metric_apply(&c.t, &c.s);
    let mut p = SphereCotangentPoint::from_vectors(x, v);
    p.reproject();
    Ok(p)
}

/// `|s|` measured by the round cometric at chart position `t`.
pub fn cometric_norm(t: &DVector<f64>, s: &DVector<f64>) -> f64 {
    s.dot(&inverse_metric_apply(t, s)).max(0.0).sqrt()
}

/// Gradient `(dH/dt, dH/ds)` of [`cometric_norm`]. Requires `H > 0`.
pub fn cometric_norm_grad(t: &DVector<f64>, s: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let h = cometric_norm(t, s);
    let ds = inverse_metric_apply(t, s) / h;
    let r = t.norm();
    if r == 0.0 {
        return (DVector::zeros(t.len()), ds);
    }
    let r2 = r * r;
    // Q = q^2 with q = r / sin r; dQ/dr / r and (1 - Q) / r^2 via series near 0
    let (dq_over_r, kappa) = if r < 1e-2 {
        (2.0 / 3.0 + 4.0 * r2 / 15.0, -1.0 / 3.0 - r2 / 15.0)
    } else {
        let sr = r.sin();
        let q = r / sr;
        let dq = (sr - r * r.cos()) / (sr * sr);
        (2.0 * q * dq / r, (1.0 - q * q) / r2)
    };
    let ts = t.dot(s);
    let p2 = ts * ts / r2;
    let a = s.norm_squared() - p2;
    // d(H^2)/dt = (Q'/r) A t + kappa (2 <t,s> s - 2 <t^,s>^2 t)
    let dh2 = t * (dq_over_r * a) + (s * (2.0 * ts) - t * (2.0 * p2)) * kappa;
    (dh2 / (2.0 * h), ds)
}
