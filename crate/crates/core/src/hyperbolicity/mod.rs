//! Finite-time Lyapunov exponents, return statistics, entropy lower bounds,
//! stable curves and periodic-point spectra for the linked twist dynamics.

mod shear_bound;
mod spectrum;
mod stable;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use shear_bound::{alternating_pairs, comparison_eigenvalue, shear_product_bound, ShearBound};
pub use spectrum::{
    best_rational, periodic_point_spectrum, solve_periodic_radii, Branch, PeriodicSpectrum, SPECTRUM_FD_STEP,
};
pub use stable::{
    lift_stable_leaf, polyline_hausdorff, stable_curve, stable_curve_along, stable_direction, stable_direction_with,
    unstable_direction, DirectionEstimate, CONTRACTION_STEPS, Dynamics, LiftedLeaf, StableCurveOptions, StableLeafSample,
    HYPERBOLICITY_THRESHOLD,
};

use crate::linked_twist::{step_with_derivative, Cocycle2, FlatPoint, RENORM_EVERY};
use crate::plumbing::PlumbingConfig;
use crate::twist_core::TwistProfile;

/// Geometric ladder of return thresholds `1/2, 1/4, ..., 1/64`.
pub const DEFAULT_DELTA_LADDER: [f64; 6] = [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625];

/// Per-point finite-time exponent and visit statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovRecord {
    pub point: FlatPoint,
    pub steps: usize,
    pub chi_plus: f64,
    /// Visit fraction of the open squares `Y1_0`.
    pub return_freq_y1: f64,
    /// Visit fraction of the open squares `Y2_0`.
    pub return_freq_y2: f64,
    pub boundary_flag: bool,
    pub cocycle: Cocycle2,
}

impl LyapunovRecord {
    /// Exponent recomputed from the stored cocycle.
    pub fn recomputed_chi(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.cocycle.log_norm() / self.steps as f64
        }
    }
}

/// Visit fractions of `Y1_delta` and `Y2_delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnFrequencies {
    pub delta: f64,
    pub y1: f64,
    pub y2: f64,
}

impl ReturnFrequencies {
    pub fn max(&self) -> f64 {
        self.y1.max(self.y2)
    }
}

/// Exponent and visit fractions for a whole ladder of thresholds, from one orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitStatistics {
    pub record: LyapunovRecord,
    pub ladder: Vec<ReturnFrequencies>,
}

impl OrbitStatistics {
    /// True when some threshold `delta` of the ladder is met by the visit
    /// frequency of `Y1_delta` or `Y2_delta`.
    pub fn meets_ladder(&self) -> bool {
        self.ladder.iter().any(|f| f.max() >= f.delta)
    }
}

/// Integrates the cocycle and counts region visits along `n` iterates.
pub fn orbit_statistics(
    p: &FlatPoint,
    cfg: &PlumbingConfig,
    profile: &TwistProfile,
    n: usize,
    deltas: &[f64],
) -> OrbitStatistics {
    let s = cfg.surface();
    let exps = cfg.exponents();
    let mut c = Cocycle2::identity();
    let mut q = (p.x, p.y);
    let mut flag = false;
    let mut hits0 = [0usize; 2];
    let mut hits = vec![[0usize; 2]; deltas.len()];
    for step in 0..n {
        let (d1, d2) = s.region_depth(q.0, q.1);
        if d1 > 0.0 {
            hits0[0] += 1;
        }
        if d2 > 0.0 {
            hits0[1] += 1;
        }
        if d1 > 0.0 || d2 > 0.0 {
            for (h, &delta) in hits.iter_mut().zip(deltas) {
                if d1 > delta {
                    h[0] += 1;
                }
                if d2 > delta {
                    h[1] += 1;
                }
            }
        }
        flag |= step_with_derivative(&s, exps, profile, &mut q, &mut c, false);
        if (step + 1) % RENORM_EVERY == 0 {
            c.renormalize();
        }
    }
    c.renormalize();
    let nf = n.max(1) as f64;
    let chi = if n == 0 { 0.0 } else { c.log_norm() / n as f64 };
    OrbitStatistics {
        record: LyapunovRecord {
            point: *p,
            steps: n,
            chi_plus: chi,
            return_freq_y1: hits0[0] as f64 / nf,
            return_freq_y2: hits0[1] as f64 / nf,
            boundary_flag: flag,
            cocycle: c,
        },
        ladder: deltas
            .iter()
            .zip(&hits)
            .map(|(&delta, h)| ReturnFrequencies { delta, y1: h[0] as f64 / nf, y2: h[1] as f64 / nf })
            .collect(),
    }
}

/// `(1/N) log` of the top singular value of the `N`-step derivative.
pub fn finite_time_lyapunov(p: &FlatPoint, cfg: &PlumbingConfig, profile: &TwistProfile, n: usize) -> LyapunovRecord {
    orbit_statistics(p, cfg, profile, n, &[]).record
}

/// Empirical visit frequencies of `Y1_delta` and `Y2_delta` over `n` iterates.
pub fn return_statistics(
    p: &FlatPoint,
    cfg: &PlumbingConfig,
    profile: &TwistProfile,
    n: usize,
    delta: f64,
) -> ReturnFrequencies {
    orbit_statistics(p, cfg, profile, n, &[delta]).ladder[0]
}

/// Orbit statistics for many points, computed in parallel; the output order
/// follows the input order.
pub fn orbit_field(
    points: &[FlatPoint],
    cfg: &PlumbingConfig,
    profile: &TwistProfile,
    n: usize,
    deltas: &[f64],
) -> Vec<OrbitStatistics> {
    points.par_iter().map(|p| orbit_statistics(p, cfg, profile, n, deltas)).collect()
}

/// Grid resolution per band: `nx` cells along, `ny` across.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn refined(&self, factor: usize) -> Self {
        Self { nx: self.nx * factor, ny: self.ny * factor }
    }
}

/// Grid average of positive finite-time exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub grid: GridSpec,
    pub points: usize,
    pub steps: usize,
    pub mean_positive_exponent: f64,
    pub positive_fraction: f64,
    /// Mean of `max(chi, 0)`, with points inside the boundary exclusion zone counted as zero.
    pub lower_bound: f64,
    pub std_error: f64,
    pub boundary_delta: f64,
    pub excluded: usize,
    pub boundary_flagged: usize,
}

/// Aggregates records into an entropy estimate. Points within
/// `boundary_delta` of a band edge contribute zero, so the bound is
/// nonincreasing in `boundary_delta`.
pub fn entropy_from_records(
    records: &[LyapunovRecord],
    grid: GridSpec,
    cfg: &PlumbingConfig,
    boundary_delta: f64,
) -> EntropyEstimate {
    let s = cfg.surface();
    let eps = s.epsilon();
    let count = records.len();
    let mut values = Vec::with_capacity(count);
    let mut excluded = 0;
    let mut positive = 0;
    let mut pos_sum = 0.0;
    for r in records {
        let near_edge = boundary_delta > 0.0
            && (1..=s.m())
                .filter(|&j| s.in_band(j, r.point.x, r.point.y))
                .any(|j| eps - s.offset(j, r.point.x, r.point.y).abs() < boundary_delta);
        let v = if near_edge {
            excluded += 1;
            0.0
        } else {
            r.chi_plus.max(0.0)
        };
        if r.chi_plus > 0.0 {
            positive += 1;
            pos_sum += r.chi_plus;
        }
        values.push(v);
    }
    let nf = count.max(1) as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = if count > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    EntropyEstimate {
        grid,
        points: count,
        steps: records.first().map(|r| r.steps).unwrap_or(0),
        mean_positive_exponent: if positive > 0 { pos_sum / positive as f64 } else { 0.0 },
        positive_fraction: positive as f64 / nf,
        lower_bound: mean,
        std_error: (var / nf).sqrt(),
        boundary_delta,
        excluded,
        boundary_flagged: records.iter().filter(|r| r.boundary_flag).count(),
    }
}

/// Entropy lower bound from the grid of finite-time exponents.
pub fn entropy_lower_bound(grid: GridSpec, cfg: &PlumbingConfig, profile: &TwistProfile, n: usize) -> EntropyEstimate {
    let points = cfg.surface().grid(grid.nx, grid.ny);
    let records: Vec<LyapunovRecord> = orbit_field(&points, cfg, profile, n, &[]).into_iter().map(|o| o.record).collect();
    entropy_from_records(&records, grid, cfg, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(exps: Vec<i64>) -> (PlumbingConfig, TwistProfile) {
        let c = PlumbingConfig::new(2, 2, 0.1, exps).unwrap();
        let r = c.profile();
        (c, r)
    }

    #[test]
    fn record_exponent_is_recomputable() {
        let (c, r) = cfg(vec![1, -1]);
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for _ in 0..50 {
            let p = c.surface().sample_uniform(&mut rng);
            let rec = finite_time_lyapunov(&p, &c, &r, 500);
            assert!((rec.recomputed_chi() - rec.chi_plus).abs() < 1e-12);
            assert!(rec.chi_plus >= 0.0);
        }
    }

    #[test]
    fn ladder_frequencies_are_monotone() {
        let (c, r) = cfg(vec![1, -1]);
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let deltas = [0.0, 0.01, 0.02, 0.03, 0.04, 0.05];
        for _ in 0..30 {
            let p = c.surface().sample_uniform(&mut rng);
            let st = orbit_statistics(&p, &c, &r, 2000, &deltas);
            for w in st.ladder.windows(2) {
                assert!(w[1].y1 <= w[0].y1 && w[1].y2 <= w[0].y2);
            }
            assert_eq!(st.ladder[0].y1, st.record.return_freq_y1);
            assert_eq!(st.ladder.last().unwrap().y1, 0.0);
        }
    }

    #[test]
    fn rotating_point_never_visits() {
        let (c, r) = cfg(vec![3, -3]);
        // r(y) = pi / 2 gives period 4 along the band; start away from the square
        let y = r.inverse(std::f64::consts::FRAC_PI_2).unwrap();
        let p = FlatPoint::new(-0.7, y);
        let f = return_statistics(&p, &c, &r, 400, 0.0);
        assert_eq!((f.y1, f.y2), (0.0, 0.0));
    }

    #[test]
    fn single_twist_entropy_is_tiny() {
        let (c, r) = cfg(vec![1, 0]);
        let e = entropy_lower_bound(GridSpec { nx: 40, ny: 10 }, &c, &r, 1000);
        assert!(e.lower_bound < 0.02, "{e:?}");
    }

    #[test]
    fn exclusion_is_monotone() {
        let (c, r) = cfg(vec![1, -1]);
        let grid = GridSpec { nx: 30, ny: 10 };
        let pts = c.surface().grid(grid.nx, grid.ny);
        let recs: Vec<LyapunovRecord> = pts.iter().map(|p| finite_time_lyapunov(p, &c, &r, 300)).collect();
        let mut last = f64::INFINITY;
        for d in [0.0, 0.01, 0.02, 0.05] {
            let e = entropy_from_records(&recs, grid, &c, d);
            assert!(e.lower_bound <= last);
            last = e.lower_bound;
        }
    }
}
