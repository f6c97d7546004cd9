//! Experiment harness for twistlab: configuration, mode dispatch, verification
//! suites and run manifests.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod verify;

pub use config::{ExperimentConfig, Mode, Suite};
pub use error::{HarnessError, Result};
pub use output::{fmt_f, OutputDir, OutputFile};
pub use run::{run, with_thread_pool, RunManifest, RunOutcome, CONFIG_FILE, MANIFEST_FILE, THREADS_ENV};
pub use verify::{Check, SuiteReport};
