//! Experiment orchestration behind the `qtomo` binary.
//!
//! A run takes a validated [`ExperimentSpec`], executes it on a dedicated
//! worker pool, writes the CSV, then writes `<out>.manifest.txt` next to it.
//! Output bytes depend only on the spec and seed, never on the worker count.

pub mod output;
pub mod spec;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::measurement::trajectory;
use crate::rng::RandomStream;
use crate::tomography::{sweep, SweepRow};

pub use output::{format_g17, write_sweep_csv, write_trajectory_csv, Manifest};
pub use spec::{parse_config_text, parse_spec, EpsilonGrid, ExperimentSpec, Mode, ModeSpec, StateSpec};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown key `{key}` for {mode} mode")]
    UnknownKey { key: String, mode: Mode },
    #[error("missing required key `{key}` for {mode} mode")]
    MissingKey { key: &'static str, mode: Mode },
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("config line {line} is not `key = value`: {text}")]
    Syntax { line: usize, text: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Simulation(#[from] crate::Error),
}

impl HarnessError {
    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
        move |source| HarnessError::Io { path: path.to_path_buf(), source }
    }
}

/// Summary of a completed run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
    /// Degenerate repetitions per grid point (empty for trajectories).
    pub failures: Vec<usize>,
    pub rows: Vec<SweepRow>,
    pub elapsed: Duration,
}

/// `<out>.manifest.txt`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".manifest.txt");
    PathBuf::from(name)
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| HarnessError::Pool(e.to_string()))?;
    Ok(pool.install(job))
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    File::create(path).map(BufWriter::new).map_err(HarnessError::io(path))
}

pub fn run_trajectory(spec: &ExperimentSpec) -> Result<RunReport, HarnessError> {
    let ModeSpec::Trajectory { sigma, steps } = spec.mode else {
        return Err(HarnessError::InvalidValue {
            key: "mode".into(),
            message: "expected a trajectory spec".into(),
        });
    };
    let start = Instant::now();
    let mut stream = RandomStream::new(spec.seed, 0);
    let tr = trajectory(&spec.density(), sigma, steps, &mut stream)?;
    write_trajectory_csv(&tr, create(&spec.out)?).map_err(HarnessError::io(&spec.out))?;
    let elapsed = start.elapsed();

    let mut info = base_info(spec, elapsed);
    info.push((
        "collapse_time_0.99".into(),
        tr.collapse_time(0.99)?.map_or("none".into(), |t| t.to_string()),
    ));
    let manifest_path = emit_manifest(spec, info)?;
    Ok(RunReport {
        csv_path: spec.out.clone(),
        manifest_path,
        failures: Vec::new(),
        rows: Vec::new(),
        elapsed,
    })
}

pub fn run_sweep(spec: &ExperimentSpec) -> Result<RunReport, HarnessError> {
    let (Some(cfg), ModeSpec::Sweep { grid, .. }) = (spec.tomography_config(), &spec.mode) else {
        return Err(HarnessError::InvalidValue {
            key: "mode".into(),
            message: "expected a sweep spec".into(),
        });
    };
    let start = Instant::now();
    let rows = with_pool(spec.threads, || sweep(&cfg, grid.values()))??;
    write_sweep_csv(&rows, create(&spec.out)?).map_err(HarnessError::io(&spec.out))?;
    let elapsed = start.elapsed();

    let failures: Vec<usize> = rows.iter().map(|r| r.failures).collect();
    let mut info = base_info(spec, elapsed);
    info.push(("grid".into(), grid.values().iter().map(|&e| format_g17(e)).collect::<Vec<_>>().join(",")));
    info.push(("degenerate_repetitions".into(), failures.iter().sum::<usize>().to_string()));
    info.push((
        "degenerate_by_epsilon".into(),
        failures.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(","),
    ));
    let manifest_path = emit_manifest(spec, info)?;
    Ok(RunReport { csv_path: spec.out.clone(), manifest_path, failures, rows, elapsed })
}

pub fn run(spec: &ExperimentSpec) -> Result<RunReport, HarnessError> {
    match spec.mode() {
        Mode::Trajectory => run_trajectory(spec),
        Mode::Sweep => run_sweep(spec),
    }
}

fn base_info(spec: &ExperimentSpec, elapsed: Duration) -> Vec<(String, String)> {
    vec![
        ("version".into(), format!("qtomo {}", env!("CARGO_PKG_VERSION"))),
        ("mode".into(), spec.mode().to_string()),
        ("master_seed".into(), spec.seed.to_string()),
        ("threads".into(), spec.threads.map_or_else(|| "auto".to_string(), |t| t.to_string())),
        ("wall_clock_seconds".into(), format!("{:.3}", elapsed.as_secs_f64())),
    ]
}

/// Write the manifest for a finished run next to its CSV.
pub fn emit_manifest(spec: &ExperimentSpec, info: Vec<(String, String)>) -> Result<PathBuf, HarnessError> {
    let path = manifest_path(&spec.out);
    let manifest = Manifest { info, config: spec.config_echo() };
    std::fs::write(&path, manifest.render()).map_err(HarnessError::io(&path))?;
    Ok(path)
}
