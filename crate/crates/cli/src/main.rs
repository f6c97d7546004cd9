use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use twistlab_cli::{run, with_thread_pool, ExperimentConfig, HarnessError, Mode, SuiteReport};

/// Composite Dehn twist laboratory.
#[derive(Debug, Parser)]
#[command(name = "twistlab", version)]
struct Args {
    /// One of: simulate, lyapunov-field, entropy, returns, stable-leaf, hf-rank,
    /// classify, chain-rate, periodic-spectrum, verify.
    mode: String,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twistlab: {e}");
            if let HarnessError::Verification(r) = &e {
                if let Some(c) = &r.counterexample {
                    eprintln!("{}", serde_json::to_string(c).unwrap_or_default());
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<(), HarnessError> {
    let mode = Mode::parse(&args.mode).ok_or_else(|| HarnessError::Config(format!("unknown mode `{}`", args.mode)))?;
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if cfg.mode != mode {
        return Err(HarnessError::Config(format!(
            "field `mode`: config says `{}` but `{}` was requested",
            cfg.mode.name(),
            mode.name()
        )));
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.output_dir = Some(o.clone());
    }
    let out = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from(format!("twistlab-{}-{}", mode.name(), &cfg.hash()[..12])));
    let outcome = with_thread_pool(|| run(&cfg, &out))??;
    if let Some(r) = &outcome.report {
        print_table(r);
    }
    outcome.into_result()?;
    println!("{}", out.join(twistlab_cli::MANIFEST_FILE).display());
    Ok(())
}

fn print_table(r: &SuiteReport) {
    println!("{}", SuiteReport::header().join(","));
    for row in r.rows() {
        println!("{}", row.join(","));
    }
}
