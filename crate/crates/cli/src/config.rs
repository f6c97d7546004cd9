//! Experiment configuration: JSON on disk, validated before any work starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use twistlab_core::hyperbolicity::DEFAULT_DELTA_LADDER;
use twistlab_core::{GridSpec, PlumbingConfig};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    LyapunovField,
    Entropy,
    Returns,
    StableLeaf,
    HfRank,
    Classify,
    ChainRate,
    PeriodicSpectrum,
    Verify,
}

impl Mode {
    pub const ALL: [Mode; 10] = [
        Mode::Simulate,
        Mode::LyapunovField,
        Mode::Entropy,
        Mode::Returns,
        Mode::StableLeaf,
        Mode::HfRank,
        Mode::Classify,
        Mode::ChainRate,
        Mode::PeriodicSpectrum,
        Mode::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::LyapunovField => "lyapunov-field",
            Mode::Entropy => "entropy",
            Mode::Returns => "returns",
            Mode::StableLeaf => "stable-leaf",
            Mode::HfRank => "hf-rank",
            Mode::Classify => "classify",
            Mode::ChainRate => "chain-rate",
            Mode::PeriodicSpectrum => "periodic-spectrum",
            Mode::Verify => "verify",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Modes that simulate the band surface and need a full plumbing config.
    fn uses_plumbing(self) -> bool {
        matches!(
            self,
            Mode::Simulate | Mode::LyapunovField | Mode::Entropy | Mode::Returns | Mode::StableLeaf | Mode::Verify
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    Conjugacy,
    Lagrangian,
    Cocycle,
    Spectra,
    Ranks,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Conjugacy => "conjugacy",
            Suite::Lagrangian => "lagrangian",
            Suite::Cocycle => "cocycle",
            Suite::Spectra => "spectra",
            Suite::Ranks => "ranks",
        }
    }
}

fn default_m() -> usize {
    2
}
fn default_n() -> usize {
    2
}
fn default_epsilon() -> f64 {
    0.1
}
fn default_exponents() -> Vec<i64> {
    vec![1, -1]
}
fn default_grid() -> GridSpec {
    GridSpec { nx: 100, ny: 20 }
}
fn default_iterations() -> usize {
    1000
}
fn default_deltas() -> Vec<f64> {
    DEFAULT_DELTA_LADDER.to_vec()
}
fn default_samples() -> usize {
    16
}
fn default_arc_length() -> f64 {
    0.05
}

/// One experiment. Fields not used by the selected mode are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_exponents")]
    pub exponents: Vec<i64>,
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Random points for `simulate` and `stable-leaf`, sweep size for `periodic-spectrum`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_arc_length")]
    pub arc_length: f64,
    /// Band-edge exclusion used by `entropy`.
    #[serde(default)]
    pub boundary_delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
}

impl ExperimentConfig {
    /// A config for `mode` with every other field at its default.
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            m: default_m(),
            n: default_n(),
            epsilon: default_epsilon(),
            exponents: default_exponents(),
            grid: default_grid(),
            iterations: default_iterations(),
            deltas: default_deltas(),
            seed: 0,
            output_dir: None,
            samples: default_samples(),
            arc_length: default_arc_length(),
            boundary_delta: 0.0,
            suite: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(self).expect("config serializes"));
        hex(&digest)
    }

    /// Field-level checks. Every problem found is reported, not just the first.
    pub fn validate(&self) -> Result<()> {
        let mut errs: Vec<String> = Vec::new();
        let mut bad = |field: &str, msg: String| errs.push(format!("field `{field}`: {msg}"));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            bad("epsilon", format!("{} is outside (0, 1)", self.epsilon));
        }
        if self.iterations == 0 {
            bad("iterations", "must be at least 1".into());
        }
        if self.samples == 0 {
            bad("samples", "must be at least 1".into());
        }
        if self.grid.nx == 0 || self.grid.ny == 0 {
            bad("grid", format!("{}x{} has an empty axis", self.grid.nx, self.grid.ny));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
            bad("deltas", format!("{d} is outside (0, 1]"));
        }
        if !(self.arc_length > 0.0 && self.arc_length.is_finite()) {
            bad("arc_length", format!("{} must be positive", self.arc_length));
        }
        if !(self.boundary_delta >= 0.0) {
            bad("boundary_delta", format!("{} must be nonnegative", self.boundary_delta));
        }
        match self.mode {
            Mode::HfRank | Mode::Classify | Mode::PeriodicSpectrum if self.exponents.len() != 2 => {
                bad("exponents", format!("mode {} needs exactly two exponents (k, l)", self.mode.name()));
            }
            Mode::ChainRate if self.exponents.len() < 2 => {
                bad("exponents", "a chain needs at least two exponents".into());
            }
            Mode::Verify if self.suite.is_none() => bad("suite", "required for mode verify".into()),
            _ => {}
        }
        if self.mode.uses_plumbing() {
            if let Err(e) = self.plumbing() {
                bad("m/n/epsilon/exponents", e);
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Config(errs.join("; ")))
        }
    }

    pub fn plumbing(&self) -> std::result::Result<PlumbingConfig, String> {
        PlumbingConfig::new(self.m, self.n, self.epsilon, self.exponents.clone()).map_err(|e| e.to_string())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
