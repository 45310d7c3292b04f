use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qtomo::harness::{self, parse_config_text, parse_spec, HarnessError, Mode};

/// Monte Carlo simulator of weak and projective qubit measurements.
#[derive(Parser, Debug)]
#[command(name = "qtomo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Record one quantum trajectory under repeated weak measurement.
    Trajectory {
        #[command(flatten)]
        common: Common,
        /// Pointer spread σ.
        #[arg(long)]
        sigma: Option<String>,
        /// Number of measurements N.
        #[arg(long)]
        steps: Option<String>,
    },
    /// Sweep tomography fidelity over the measurement strength ε.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Ensemble size n.
        #[arg(long)]
        ensemble: Option<String>,
        /// Single value, comma list, or start:stop:step.
        #[arg(long)]
        epsilon: Option<String>,
        /// Repetitions per grid point (default 100000).
        #[arg(long)]
        reps: Option<String>,
        /// Discard half-width a (default 0).
        #[arg(long)]
        discard: Option<String>,
        /// weak | projective (default weak).
        #[arg(long)]
        scheme: Option<String>,
        /// signed | raw (default signed).
        #[arg(long)]
        binning: Option<String>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bloch triple `x,y,z` or eight reals `r00re,r00im,r01re,r01im,r10re,r10im,r11re,r11im`.
    #[arg(long, allow_hyphen_values = true)]
    state: Option<String>,
    /// Master seed (falls back to QTOMO_SEED, then 0).
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads (default: available parallelism). Does not affect output.
    #[arg(long)]
    threads: Option<String>,
    /// Output CSV path; the manifest is written to `<out>.manifest.txt`.
    #[arg(long)]
    out: Option<String>,
}

fn push(entries: &mut Vec<(String, String)>, key: &str, value: Option<String>) {
    if let Some(v) = value {
        entries.push((key.to_string(), v));
    }
}

fn collect(common: Common) -> Result<Vec<(String, String)>, HarnessError> {
    let mut entries = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| HarnessError::Io { path: path.clone(), source })?;
            parse_config_text(&text)?
        }
        None => Vec::new(),
    };
    push(&mut entries, "state", common.state);
    push(&mut entries, "seed", common.seed);
    push(&mut entries, "threads", common.threads);
    push(&mut entries, "out", common.out);
    Ok(entries)
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    let (mode, entries) = match cli.command {
        Command::Trajectory { common, sigma, steps } => {
            let mut e = collect(common)?;
            push(&mut e, "sigma", sigma);
            push(&mut e, "steps", steps);
            (Mode::Trajectory, e)
        }
        Command::Sweep { common, ensemble, epsilon, reps, discard, scheme, binning } => {
            let mut e = collect(common)?;
            push(&mut e, "ensemble", ensemble);
            push(&mut e, "epsilon", epsilon);
            push(&mut e, "reps", reps);
            push(&mut e, "discard", discard);
            push(&mut e, "scheme", scheme);
            push(&mut e, "binning", binning);
            (Mode::Sweep, e)
        }
    };
    let env_seed = std::env::var("QTOMO_SEED").ok();
    let spec = parse_spec(mode, &entries, env_seed.as_deref())?;
    let report = harness::run(&spec)?;
    let total: usize = report.failures.iter().sum();
    eprintln!(
        "wrote {} and {} in {:.2}s",
        report.csv_path.display(),
        report.manifest_path.display(),
        report.elapsed.as_secs_f64()
    );
    if total > 0 {
        eprintln!("excluded {total} degenerate repetitions (see manifest)");
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qtomo: {e}");
            ExitCode::FAILURE
        }
    }
}
