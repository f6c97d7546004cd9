//! Mode dispatch, run directories and manifests.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use twistlab_core::hyperbolicity::{
    entropy_from_records, lift_stable_leaf, orbit_field, periodic_point_spectrum, solve_periodic_radii, stable_curve,
    StableCurveOptions, CONTRACTION_STEPS,
};
use twistlab_core::linked_twist::{composite_map, FlatPoint};
use twistlab_core::mcg_floer::{chain_stretch_factor, classify, composite_matrix, growth_rate, hf_rank_sequence, ChainConfig};
use twistlab_core::plumbing::{sample_thetas, PlumbingConfig};
use twistlab_core::TwistProfile;

use crate::config::{ExperimentConfig, Mode};
use crate::error::{HarnessError, Result};
use crate::output::{fmt_f, OutputDir, OutputFile};
use crate::verify::{run_suite, SuiteReport};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.json";
/// Overrides the worker-pool size.
pub const THREADS_ENV: &str = "TWISTLAB_THREADS";

/// Record of one run. Everything except `wall_time_s` is a function of the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub mode: Mode,
    pub seed: u64,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputFile>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    /// Present for `verify` runs.
    pub report: Option<SuiteReport>,
}

impl RunOutcome {
    /// Turns a failed verification into an error.
    pub fn into_result(self) -> Result<RunOutcome> {
        match &self.report {
            Some(r) if !r.passed() => Err(HarnessError::Verification(Box::new(r.clone()))),
            _ => Ok(self),
        }
    }
}

/// Runs `f` on a pool sized by [`THREADS_ENV`] when it is set.
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| HarnessError::Config(format!("{THREADS_ENV}={v:?} is not a positive integer")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Config(format!("cannot build a pool of {n} threads: {e}")))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

/// Executes `cfg`, writing outputs, the config and a manifest into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let mut dir = OutputDir::create(out)?;
    dir.write_text(CONFIG_FILE, &(cfg.to_json() + "\n"))?;
    let mut report = None;
    match cfg.mode {
        Mode::Simulate => simulate(cfg, &mut dir)?,
        Mode::LyapunovField => lyapunov_field(cfg, &mut dir)?,
        Mode::Entropy => entropy(cfg, &mut dir)?,
        Mode::Returns => returns(cfg, &mut dir)?,
        Mode::StableLeaf => stable_leaf(cfg, &mut dir)?,
        Mode::HfRank => hf_rank(cfg, &mut dir)?,
        Mode::Classify => {
            let c = classify(&composite_matrix(cfg.exponents[0], cfg.exponents[1]));
            dir.write_json("classification.json", &c)?;
        }
        Mode::ChainRate => {
            let cert = chain_stretch_factor(&ChainConfig::new(cfg.exponents.clone()))?;
            dir.write_json("chain.json", &cert)?;
        }
        Mode::PeriodicSpectrum => periodic_spectrum(cfg, &mut dir)?,
        Mode::Verify => {
            let suite = cfg.suite.ok_or_else(|| HarnessError::Config("field `suite`: required".into()))?;
            let r = run_suite(suite, &plumbing(cfg)?, cfg.seed);
            dir.write_csv("verify.csv", &SuiteReport::header(), &r.rows())?;
            if let Some(c) = &r.counterexample {
                dir.write_json("counterexample.json", c)?;
            }
            report = Some(r);
        }
    }
    let manifest = RunManifest {
        config_hash: cfg.hash(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        mode: cfg.mode,
        seed: cfg.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: dir.files().to_vec(),
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    std::fs::write(dir.root().join(MANIFEST_FILE), bytes)?;
    Ok(RunOutcome { manifest, report })
}

fn plumbing(cfg: &ExperimentConfig) -> Result<PlumbingConfig> {
    cfg.plumbing().map_err(HarnessError::Config)
}

fn band(p: &FlatPoint) -> String {
    p.band.map(|b| b.to_string()).unwrap_or_default()
}

fn random_points(cfg: &ExperimentConfig, pc: &PlumbingConfig) -> Vec<FlatPoint> {
    let s = pc.surface();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.samples).map(|_| s.sample_uniform(&mut rng)).collect()
}

fn simulate(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<()> {
    let pc = plumbing(cfg)?;
    let r = pc.profile();
    let starts = random_points(cfg, &pc);
    let orbits: Vec<Vec<FlatPoint>> = starts
        .par_iter()
        .map(|p| {
            let mut q = *p;
            let mut orbit = Vec::with_capacity(cfg.iterations + 1);
            orbit.push(q);
            for _ in 0..cfg.iterations {
                q = composite_map(&q, &pc, &r);
                orbit.push(q);
            }
            orbit
        })
        .collect();
    let mut rows = Vec::new();
    for (i, orbit) in orbits.iter().enumerate() {
        for (step, q) in orbit.iter().enumerate() {
            rows.push(vec![i.to_string(), step.to_string(), fmt_f(q.x), fmt_f(q.y), band(q)]);
        }
    }
    dir.write_csv("orbits.csv", &["orbit", "step", "x", "y", "band"], &rows)
}

const FIELD_HEADER: [&str; 7] = ["x", "y", "band", "chi_plus", "freq1", "freq2", "boundary_flag"];

fn field_rows(stats: &[twistlab_core::OrbitStatistics]) -> Vec<Vec<String>> {
    stats
        .iter()
        .map(|s| {
            let r = &s.record;
            vec![
                fmt_f(r.point.x),
                fmt_f(r.point.y),
                band(&r.point),
                fmt_f(r.chi_plus),
                fmt_f(r.return_freq_y1),
                fmt_f(r.return_freq_y2),
                r.boundary_flag.to_string(),
            ]
        })
        .collect()
}

fn grid_stats(cfg: &ExperimentConfig, deltas: &[f64]) -> Result<(PlumbingConfig, Vec<twistlab_core::OrbitStatistics>)> {
    let pc = plumbing(cfg)?;
    let points = pc.surface().grid(cfg.grid.nx, cfg.grid.ny);
    let stats = orbit_field(&points, &pc, &pc.profile(), cfg.iterations, deltas);
    Ok((pc, stats))
}

fn lyapunov_field(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<()> {
    let (_, stats) = grid_stats(cfg, &[])?;
    dir.write_csv("field.csv", &FIELD_HEADER, &field_rows(&stats))
}

fn entropy(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<()> {
    let (pc, stats) = grid_stats(cfg, &[])?;
    dir.write_csv("field.csv", &FIELD_HEADER, &field_rows(&stats))?;
    let records: Vec<_> = stats.into_iter().map(|s| s.record).collect();
    let est = entropy_from_records(&records, cfg.grid, &pc, cfg.boundary_delta);
    dir.write_json("entropy.json", &est)
}

fn returns(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<()> {
    let (_, stats) = grid_stats(cfg, &cfg.deltas)?;
    let mut rows = Vec::new();
    for (i, s) in stats.iter().enumerate() {
        for f in &s.ladder {
            rows.push(vec![
                i.to_string(),
                fmt_f(s.record.point.x),
                fmt_f(s.record.point.y),
                fmt_f(f.delta),
                fmt_f(f.y1),
                fmt_f(f.y2),
                (f.max() >= f.delta).to_string(),
            ]);
        }
    }
    dir.write_csv("returns.csv", &["point", "x", "y", "delta", "freq1", "freq2", "meets"], &rows)?;
    let n = stats.len().max(1) as f64;
    let meeting = stats.iter().filter(|s| s.meets_ladder()).count() as f64 / n;
    let per_delta: Vec<_> = cfg
        .deltas
        .iter()
        .enumerate()
        .map(|(j, d)| {
            let mean1 = stats.iter().map(|s| s.ladder[j].y1).sum::<f64>() / n;
            let mean2 = stats.iter().map(|s| s.ladder[j].y2).sum::<f64>() / n;
            json!({ "delta": d, "mean_freq1": mean1, "mean_freq2": mean2 })
        })
        .collect();
    dir.write_json(
        "returns_summary.json",
        &json!({ "points": stats.len(), "fraction_meeting_ladder": meeting, "per_delta": per_delta }),
    )
}

fn stable_leaf(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<()> {
    let pc = plumbing(cfg)?;
    let r = pc.profile();
    let starts = random_points(cfg, &pc);
    let opts = StableCurveOptions { arc_length: cfg.arc_length, ..Default::default() };
    let results: Vec<_> = starts
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let sample = stable_curve(p, &pc, &r, &opts)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1 + i as u64));
            let thetas = sample_thetas(pc.n(), 4, &mut rng);
            let lifted = lift_stable_leaf(&sample, &pc, &r, &thetas, CONTRACTION_STEPS);
            Ok::<_, twistlab_core::TwistError>((sample, lifted))
        })
        .collect();
    let mut summary = Vec::new();
    let mut points = Vec::new();
    let mut cloud = Vec::new();
    for (i, (p, res)) in starts.iter().zip(results).enumerate() {
        let (sample, lifted) = match res {
            Ok(x) => x,
            Err(e) => {
                let mut row = vec![i.to_string(), fmt_f(p.x), fmt_f(p.y), format!("rejected: {e}")];
                row.extend(std::iter::repeat_n(String::new(), 8));
                summary.push(row);
                continue;
            }
        };
        let log_rate = sample.contraction_rates.iter().map(|c| c.ln()).sum::<f64>() / sample.contraction_rates.len().max(1) as f64;
        let (status, omega) = match &lifted {
            Ok(l) => ("ok".to_string(), fmt_f(l.omega_residual)),
            Err(e) => (format!("lift rejected: {e}"), String::new()),
        };
        summary.push(vec![
            i.to_string(),
            fmt_f(p.x),
            fmt_f(p.y),
            status,
            fmt_f(sample.chi),
            sample.converged.to_string(),
            sample.pullback_steps.to_string(),
            fmt_f(sample.hausdorff_change),
            fmt_f(sample.tangent_error),
            fmt_f(sample.length(&pc.surface())),
            fmt_f(log_rate),
            omega,
        ]);
        for (j, q) in sample.polyline.iter().enumerate() {
            points.push(vec![i.to_string(), j.to_string(), fmt_f(q.x), fmt_f(q.y)]);
        }
        if let Ok(l) = lifted {
            for (t, j, a) in l.leaf.points() {
                let mut row = vec![i.to_string(), t.to_string(), j.to_string(), a.sphere.to_string()];
                row.extend(a.point.x().iter().chain(a.point.v().iter()).map(|z| fmt_f(*z)));
                cloud.push(row);
            }
        }
    }
    dir.write_csv(
        "leaves.csv",
        &[
            "leaf",
            "x",
            "y",
            "status",
            "chi",
            "converged",
            "pullback_steps",
            "hausdorff_change",
            "tangent_error",
            "length",
            "mean_log_contraction",
            "omega_residual",
        ],
        &summary,
    )?;
    dir.write_csv("leaf_points.csv", &["leaf", "index", "x", "y"], &points)?;
    let dim = pc.n() + 1;
    let mut header: Vec<String> = ["leaf", "theta", "index", "sphere"].iter().map(|s| s.to_string()).collect();
    header.extend((1..=dim).map(|i| format!("x{i}")));
    header.extend((1..=dim).map(|i| format!("v{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    dir.write_csv("leaf_cloud.csv", &header, &cloud)
}

fn hf_rank(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<()> {
    let (k, l) = (cfg.exponents[0], cfg.exponents[1]);
    let seq = hf_rank_sequence(k, l, cfg.iterations);
    let rows: Vec<Vec<String>> = seq
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| vec![(i + 1).to_string(), v.as_ref().map(|b| b.to_string()).unwrap_or_default()])
        .collect();
    dir.write_csv("hf_rank.csv", &["n", "rank"], &rows)?;
    let growth = match growth_rate(&seq) {
        Ok(g) => json!({ "window_liminf": g.window_liminf, "extrapolated": g.extrapolated, "gamma": g.gamma() }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let class = classify(&composite_matrix(k, l));
    dir.write_json(
        "growth.json",
        &json!({
            "k": k,
            "l": l,
            "gamma_estimate": seq.gamma_estimate,
            "growth": growth,
            "classification": class,
            "log_stretch": class.stretch_factor().map(f64::ln),
        }),
    )
}

fn periodic_spectrum(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<()> {
    let (k, l) = (cfg.exponents[0], cfg.exponents[1]);
    let profile = TwistProfile::new(cfg.epsilon)?;
    let radius = |p: i64| {
        let angle = 2.0 * PI / p.unsigned_abs().max(1) as f64;
        profile
            .inverse(angle)
            .filter(|h| *h > 0.0 && *h < cfg.epsilon)
            .ok_or_else(|| HarnessError::Config(format!("field `exponents`: |{p}| < 3 has no periodic radius inside the support")))
    };
    let (h1, h2) = (radius(k)?, radius(l)?);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let base: f64 = rng.gen_range(0.0..2.0 * PI);
    let mut rows = Vec::new();
    for i in 0..cfg.samples {
        let phi = PI * (i as f64 + 0.5) / cfg.samples as f64;
        let (u, v) = solve_periodic_radii([base.cos(), base.sin()], [(base + phi).cos(), (base + phi).sin()], h1, h2);
        let mut row = vec![fmt_f(phi)];
        match periodic_point_spectrum(u, v, k, l, &profile) {
            Ok(sp) => {
                let ev = sp.eigenvalues;
                row.extend([
                    fmt_f(sp.inner_product()),
                    fmt_f(ev[0][0]),
                    fmt_f(ev[0][1]),
                    fmt_f(ev[3][0]),
                    fmt_f(ev[3][1]),
                    fmt_f(sp.block_trace),
                    fmt_f(sp.full_trace),
                    fmt_f(sp.max_relative_mismatch),
                    sp.expanding.map(|b| format!("{b:?}")).unwrap_or_default(),
                    "ok".to_string(),
                ]);
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 9));
                row.push(format!("rejected: {e}"));
            }
        }
        rows.push(row);
    }
    dir.write_csv(
        "spectra.csv",
        &[
            "phi",
            "inner_product",
            "lambda1_re",
            "lambda1_im",
            "lambda4_re",
            "lambda4_im",
            "block_trace",
            "full_trace",
            "max_relative_mismatch",
            "expanding",
            "status",
        ],
        &rows,
    )
}
