//! Linearization of `tau_1^k tau_2^l` at periodic points of the two-sphere
//! plumbing, in the south chart of the first sphere.
//!
//! With `H_1(u, v) = |v|_u` and `H_2(u, v) = |u|_{-v}` the twists are
//! `tau_1^k = phi_1^{k r(H_1)}` and `tau_2^l = phi_2^{l r(H_2)}`. At a point
//! where both angles are multiples of `2 pi` the derivative is
//! `(I + a X_1 dH_1)(I + b X_2 dH_2)` with `a = k r'(H_1)`, `b = l r'(H_2)`.
//! It fixes the common kernel of `dH_1, dH_2` and acts on `span(X_1, X_2)` by
//! `[[1 + a b c_1 c_2, a c_1], [b c_2, 1]]`, `c_1 = dH_1(X_2)`, `c_2 = dH_2(X_1)`.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwistError};
use crate::plumbing::{
    chart_backward, chart_forward, cometric_norm, cometric_norm_grad, composite_twist, composite_twist_inverse, represent_on, AmbientPoint,
    ChartPoint, PlumbingConfig, Pole,
};
use crate::twist_core::TwistProfile;

/// Base step of the Richardson-extrapolated finite-difference Jacobian.
pub const SPECTRUM_FD_STEP: f64 = 1e-6;

/// Tolerance on `k r(H_1)` and `l r(H_2)` being multiples of `2 pi`.
const PERIOD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

/// Closed-form and numerical spectrum at a periodic point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSpectrum {
    pub u: [f64; 2],
    pub v: [f64; 2],
    pub k: i64,
    pub l: i64,
    pub h1: f64,
    pub h2: f64,
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    /// `[lambda(w_1), 1, 1, lambda(w_4)]` as `(re, im)` pairs; `w_1` is the
    /// `+` root of the `mu` quadratic and `w_4` the `-` root.
    pub eigenvalues: [[f64; 2]; 4],
    /// Eigenvectors in chart coordinates `(u, v)`, present when real.
    pub w1: Option<[f64; 4]>,
    pub w4: Option<[f64; 4]>,
    /// Branch carrying the eigenvalue above one, when hyperbolic.
    pub expanding: Option<Branch>,
    pub block_trace: f64,
    pub full_trace: f64,
    /// Eigenvalues of the same block with `a, b, c_1, c_2` replaced by
    /// `k r'(|v|)`, `l r'(|u|)`, `-<u^, v^>` and `<u^, v^>`.
    pub leading_order: [[f64; 2]; 4],
    pub fd_jacobian: [[f64; 4]; 4],
    pub fd_eigenvalues: [[f64; 2]; 4],
    /// Largest `|lambda_fd - lambda| / |lambda|` after sorting both spectra.
    pub max_relative_mismatch: f64,
    /// `|F(z) - z|` in chart coordinates.
    pub orbit_residual: f64,
}

impl PeriodicSpectrum {
    pub fn inner_product(&self) -> f64 {
        self.u[0] * self.v[0] + self.u[1] * self.v[1]
    }

    /// Largest eigenvalue modulus of the closed form.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z[0].hypot(z[1])).fold(0.0, f64::max)
    }
}

/// Best rational approximation `p/q` of `x` with `q <= max_den`.
pub fn best_rational(x: f64, max_den: i64) -> (i64, i64) {
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i64;
        let k2 = ai.saturating_mul(k1).saturating_add(k0);
        if k2 > max_den || k2 <= 0 {
            break;
        }
        let h2 = ai.saturating_mul(h1).saturating_add(h0);
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let f = r - a;
        if f.abs() < 1e-15 {
            break;
        }
        r = 1.0 / f;
    }
    (h1, k1)
}

fn dv(a: &[f64; 2]) -> DVector<f64> {
    DVector::from_column_slice(a)
}

/// Radii `(|u|, |v|)` along the given unit directions with
/// `H_1 = h1` and `H_2 = h2`.
pub fn solve_periodic_radii(u_dir: [f64; 2], v_dir: [f64; 2], h1: f64, h2: f64) -> ([f64; 2], [f64; 2]) {
    let nu = u_dir[0].hypot(u_dir[1]);
    let nv = v_dir[0].hypot(v_dir[1]);
    let uh = [u_dir[0] / nu, u_dir[1] / nu];
    let vh = [v_dir[0] / nv, v_dir[1] / nv];
    let (mut ru, mut rv) = (h2, h1);
    for _ in 0..200 {
        let u = dv(&[ru * uh[0], ru * uh[1]]);
        let v = dv(&[rv * vh[0], rv * vh[1]]);
        let new_rv = rv * h1 / cometric_norm(&u, &v);
        let v = dv(&[new_rv * vh[0], new_rv * vh[1]]);
        let new_ru = ru * h2 / cometric_norm(&-v, &u);
        let done = (new_ru - ru).abs() < 1e-17 && (new_rv - rv).abs() < 1e-17;
        ru = new_ru;
        rv = new_rv;
        if done {
            break;
        }
    }
    ([ru * uh[0], ru * uh[1]], [rv * vh[0], rv * vh[1]])
}

struct Hamiltonians {
    h1: f64,
    h2: f64,
    dh1: [f64; 4],
    dh2: [f64; 4],
}

fn hamiltonians(u: &[f64; 2], v: &[f64; 2]) -> Hamiltonians {
    let (uu, vv) = (dv(u), dv(v));
    let h1 = cometric_norm(&uu, &vv);
    let (g1t, g1s) = cometric_norm_grad(&uu, &vv);
    let mv = -&vv;
    let h2 = cometric_norm(&mv, &uu);
    // H_2(u, v) = N(-v, u): dH_2/du = dN/ds, dH_2/dv = -dN/dt
    let (g2t, g2s) = cometric_norm_grad(&mv, &uu);
    Hamiltonians {
        h1,
        h2,
        dh1: [g1t[0], g1t[1], g1s[0], g1s[1]],
        dh2: [g2s[0], g2s[1], -g2t[0], -g2t[1]],
    }
}

fn hamiltonian_vector(dh: &[f64; 4]) -> [f64; 4] {
    [dh[2], dh[3], -dh[0], -dh[1]]
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigenvalues `[lambda_+, 1, 1, lambda_-]` of the block for the given data,
/// plus the `mu` roots when real.
fn block_spectrum(a: f64, b: f64, c1: f64, c2: f64) -> ([[f64; 2]; 4], Option<(f64, f64)>) {
    if a * b * c1 * c2 == 0.0 {
        return ([[1.0, 0.0]; 4], None);
    }
    let disc = a * a * c1 * c1 + 4.0 * a * c1 / (b * c2);
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let mp = 0.5 * (a * c1 + sq);
        let mm = 0.5 * (a * c1 - sq);
        // the roots multiply to one; take the small one as a reciprocal to avoid cancellation
        let (mut lp, mut lm) = (1.0 + b * c2 * mp, 1.0 + b * c2 * mm);
        if lp.abs() >= lm.abs() {
            lm = 1.0 / lp;
        } else {
            lp = 1.0 / lm;
        }
        ([[lp, 0.0], [1.0, 0.0], [1.0, 0.0], [lm, 0.0]], Some((mp, mm)))
    } else {
        let re = 1.0 + b * c2 * 0.5 * a * c1;
        let im = 0.5 * b * c2 * (-disc).sqrt();
        ([[re, im], [1.0, 0.0], [1.0, 0.0], [re, -im]], None)
    }
}

fn chart_map(z: &[f64; 4], cfg: &PlumbingConfig, profile: &TwistProfile, inverse: bool) -> Result<[f64; 4]> {
    let c = ChartPoint::new(vec![z[0], z[1]], vec![z[2], z[3]])?;
    let p = AmbientPoint::new(1, chart_backward(&c, Pole::South)?);
    let q = if inverse { composite_twist_inverse(&p, cfg, profile)? } else { composite_twist(&p, cfg, profile)? };
    let on1 = represent_on(&q, 1, false).ok_or(TwistError::OutsideChart)?;
    let out = chart_forward(&on1, Pole::South)?;
    Ok([out.t[0], out.t[1], out.s[0], out.s[1]])
}

fn fd_jacobian(z: &[f64; 4], h: f64, cfg: &PlumbingConfig, profile: &TwistProfile, inverse: bool) -> Result<[[f64; 4]; 4]> {
    let mut jac = [[0.0; 4]; 4];
    for j in 0..4 {
        let mut zp = *z;
        let mut zm = *z;
        zp[j] += h;
        zm[j] -= h;
        let fp = chart_map(&zp, cfg, profile, inverse)?;
        let fm = chart_map(&zm, cfg, profile, inverse)?;
        for i in 0..4 {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

fn richardson_jacobian(
    z: &[f64; 4],
    cfg: &PlumbingConfig,
    profile: &TwistProfile,
    inverse: bool,
) -> Result<[[f64; 4]; 4]> {
    let j1 = fd_jacobian(z, SPECTRUM_FD_STEP, cfg, profile, inverse)?;
    let j2 = fd_jacobian(z, 0.5 * SPECTRUM_FD_STEP, cfg, profile, inverse)?;
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| (4.0 * j2[i][j] - j1[i][j]) / 3.0)))
}

fn sort_spectrum(mut s: [[f64; 2]; 4]) -> [[f64; 2]; 4] {
    s.sort_by(|x, y| x[0].total_cmp(&y[0]).then(x[1].total_cmp(&y[1])));
    s
}

fn normalize4(w: [f64; 4]) -> [f64; 4] {
    let n = dot4(&w, &w).sqrt();
    [w[0] / n, w[1] / n, w[2] / n, w[3] / n]
}

/// Spectrum of `D(tau_1^k tau_2^l)` at the chart point `(u, v)` of the first
/// sphere. Both twist angles must be multiples of `2 pi` and both
/// Hamiltonians must lie inside the twist support.
pub fn periodic_point_spectrum(
    u: [f64; 2],
    v: [f64; 2],
    k: i64,
    l: i64,
    profile: &TwistProfile,
) -> Result<PeriodicSpectrum> {
    let hs = hamiltonians(&u, &v);
    let eps = profile.epsilon();
    for (name, h, power) in [("H_1", hs.h1, k), ("H_2", hs.h2, l)] {
        if !(h > 0.0 && h < eps) {
            return Err(TwistError::NotPeriodic(format!("{name} = {h:.6e} outside the twist support (0, {eps})")));
        }
        let turns = power as f64 * profile.eval(h) / (2.0 * PI);
        if (turns - turns.round()).abs() * 2.0 * PI > PERIOD_TOL {
            let (p, q) = best_rational(profile.eval(h) / PI, 1000);
            return Err(TwistError::NotPeriodic(format!(
                "{name}: {power} r(H) = {:.12} is not a multiple of 2 pi (r(H) ~ {p}/{q} pi)",
                power as f64 * profile.eval(h)
            )));
        }
    }
    let a = k as f64 * profile.deriv(hs.h1);
    let b = l as f64 * profile.deriv(hs.h2);
    let x1 = hamiltonian_vector(&hs.dh1);
    let x2 = hamiltonian_vector(&hs.dh2);
    let c1 = dot4(&hs.dh1, &x2);
    let c2 = dot4(&hs.dh2, &x1);
    let (eigenvalues, mus) = block_spectrum(a, b, c1, c2);
    let (w1, w4, expanding) = match mus {
        Some((mp, mm)) => {
            let wp = normalize4(std::array::from_fn(|i| mp * x1[i] + x2[i]));
            let wm = normalize4(std::array::from_fn(|i| mm * x1[i] + x2[i]));
            let exp = if eigenvalues[0][0] > 1.0 { Branch::Plus } else { Branch::Minus };
            (Some(wp), Some(wm), Some(exp))
        }
        None => (None, None, None),
    };

    let nu = u[0].hypot(u[1]);
    let nv = v[0].hypot(v[1]);
    let cos = if nu > 0.0 && nv > 0.0 { (u[0] * v[0] + u[1] * v[1]) / (nu * nv) } else { 0.0 };
    let a0 = k as f64 * profile.deriv(nv);
    let b0 = l as f64 * profile.deriv(nu);
    let (leading_order, _) = block_spectrum(a0, b0, -cos, cos);

    let cfg = PlumbingConfig::new(2, 2, eps, vec![k, l])?;
    let z = [u[0], u[1], v[0], v[1]];
    let fz = chart_map(&z, &cfg, profile, false)?;
    let orbit_residual = (0..4).map(|i| (fz[i] - z[i]).powi(2)).sum::<f64>().sqrt();
    let fd = richardson_jacobian(&z, &cfg, profile, false)?;
    let ev = DMatrix::from_fn(4, 4, |i, j| fd[i][j]).complex_eigenvalues();
    let mut fd_ev: Vec<Complex<f64>> = ev.iter().copied().collect();
    // A contracting eigenvalue read off the forward Jacobian loses all the
    // digits cancelled against the expanding one, so take it as the
    // reciprocal of the expanding eigenvalue of the inverse map instead.
    let (small, _) = fd_ev.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, z)| {
        if z.norm() < acc.1 { (i, z.norm()) } else { acc }
    });
    if fd_ev[small].norm() < 1.0 - 1e-6 {
        let inv = richardson_jacobian(&z, &cfg, profile, true)?;
        let inv_ev = DMatrix::from_fn(4, 4, |i, j| inv[i][j]).complex_eigenvalues();
        let big = inv_ev.iter().copied().fold(Complex::new(0.0, 0.0), |a, z| if z.norm() > a.norm() { z } else { a });
        fd_ev[small] = big.inv();
    }
    let fd_eigenvalues = sort_spectrum(std::array::from_fn(|i| [fd_ev[i].re, fd_ev[i].im]));
    let closed = sort_spectrum(eigenvalues);
    let max_relative_mismatch = closed
        .iter()
        .zip(&fd_eigenvalues)
        .map(|(c, f)| (c[0] - f[0]).hypot(c[1] - f[1]) / c[0].hypot(c[1]))
        .fold(0.0, f64::max);

    Ok(PeriodicSpectrum {
        u,
        v,
        k,
        l,
        h1: hs.h1,
        h2: hs.h2,
        a,
        b,
        c1,
        c2,
        eigenvalues,
        w1,
        w4,
        expanding,
        block_trace: 2.0 + a * b * c1 * c2,
        full_trace: 4.0 + a * b * c1 * c2,
        leading_order,
        fd_jacobian: fd,
        fd_eigenvalues,
        max_relative_mismatch,
        orbit_residual,
    })
}
