//! Fixtures shared by the criterion benchmarks in `benches/`.

use twistlab_core::{FlatPoint, PlumbingConfig};

/// The co-rotating two-band configuration used throughout the experiments.
pub fn standard_config() -> PlumbingConfig {
    PlumbingConfig::new(2, 2, 0.1, vec![1, -1]).expect("valid configuration")
}

/// A coarse grid of starting points on the band surface.
pub fn starting_points(cfg: &PlumbingConfig) -> Vec<FlatPoint> {
    cfg.surface().grid(40, 5)
}
