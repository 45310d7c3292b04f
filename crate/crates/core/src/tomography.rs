//! Single-qubit state tomography by weak and projective measurement.
//!
//! Two schemes are provided:
//!
//! - [`Scheme::Weak`]: every qubit of the ensemble goes through a weak σz
//!   measurement, a weak σx measurement (after rotating x onto z) and a final
//!   projective σy measurement (after rotating y onto z). The x and y estimates
//!   are rescaled by `e^{ε/2}` and `e^{ε}` to undo the average coherence loss
//!   caused by the earlier weak measurements. The z estimate is left as is.
//! - [`Scheme::Projective`]: the ensemble is split into three equal parts, one
//!   per axis, and each qubit gets a single projective measurement.
//!
//! Estimates are scored with `f = 1 − |v − v_est|²`, averaged over independent
//! repetitions and swept over the measurement strength.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measurement::{projective_measure, weak_measure, Branch, PointerSample};
use crate::rng::RandomStream;
use crate::state::{BlochVector, DensityMatrix, RotationSpec};

/// Estimated Bloch vector. Not required to lie inside the unit sphere.
pub type EstimateTriple = BlochVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Weak,
    Projective,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Weak => "weak",
            Scheme::Projective => "projective",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "weak" => Ok(Scheme::Weak),
            "projective" => Ok(Scheme::Projective),
            other => {
                Err(Error::InvalidConfig(format!("unknown scheme `{other}` (expected weak|projective)")))
            }
        }
    }
}

/// How a valid meter reading is accumulated into its tally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Binning {
    /// ±1 by the side of the discard region the reading falls on.
    Signed,
    /// The reading itself; the discard region is ignored.
    Raw,
}

impl fmt::Display for Binning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Binning::Signed => "signed",
            Binning::Raw => "raw",
        })
    }
}

impl FromStr for Binning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "signed" => Ok(Binning::Signed),
            "raw" => Ok(Binning::Raw),
            other => Err(Error::InvalidConfig(format!("unknown binning `{other}` (expected signed|raw)"))),
        }
    }
}

pub const DEFAULT_REPETITIONS: usize = 100_000;

/// Full description of one tomography experiment at a single strength.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyConfig {
    pub state: DensityMatrix,
    /// Ensemble size `n`.
    pub ensemble: usize,
    /// Strength `ε` shared by both weak measurements.
    pub epsilon: f64,
    /// Half-width `a` of the discard region.
    pub discard: f64,
    pub scheme: Scheme,
    pub binning: Binning,
    /// Number of independent repetitions `N`.
    pub repetitions: usize,
    pub seed: u64,
}

impl TomographyConfig {
    pub fn new(state: DensityMatrix, ensemble: usize, epsilon: f64, scheme: Scheme) -> Self {
        Self {
            state,
            ensemble,
            epsilon,
            discard: 0.0,
            scheme,
            binning: Binning::Signed,
            repetitions: DEFAULT_REPETITIONS,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !self.state.diagnostics().is_valid() {
            return bad("state is not a valid density matrix".into());
        }
        if self.ensemble == 0 {
            return bad("ensemble size must be at least 1".into());
        }
        if self.scheme == Scheme::Projective && !self.ensemble.is_multiple_of(3) {
            return bad(format!(
                "projective scheme splits the ensemble three ways; {} is not divisible by 3",
                self.ensemble
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive and finite, got {}", self.epsilon));
        }
        if !(self.discard >= 0.0 && self.discard.is_finite()) {
            return bad(format!("discard parameter must be non-negative, got {}", self.discard));
        }
        if self.repetitions == 0 || self.repetitions > u32::MAX as usize {
            return bad(format!("repetitions must lie in 1..={}, got {}", u32::MAX, self.repetitions));
        }
        Ok(())
    }
}

/// Running sum and count of accepted readings for one axis.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TallyPair {
    pub sum: f64,
    pub count: usize,
}

impl TallyPair {
    fn record(&mut self, sample: &PointerSample, binning: Binning, discard: f64) {
        match binning {
            Binning::Signed => {
                if sample.reading >= discard {
                    self.sum += 1.0;
                    self.count += 1;
                } else if sample.reading <= -discard {
                    self.sum -= 1.0;
                    self.count += 1;
                }
            }
            Binning::Raw => {
                self.sum += sample.reading;
                self.count += 1;
            }
        }
    }

    fn mean(&self, component: &'static str) -> Result<f64> {
        if self.count == 0 {
            return Err(Error::DegenerateRun { component });
        }
        Ok(self.sum / self.count as f64)
    }
}

/// Raw counts from one run of the weak protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakTallies {
    pub z: TallyPair,
    pub x: TallyPair,
    /// Number of `+1` outcomes of the final projective σy measurement.
    pub y_plus: usize,
    pub ensemble: usize,
}

impl WeakTallies {
    pub fn discarded_z(&self) -> usize {
        self.ensemble - self.z.count
    }

    pub fn discarded_x(&self) -> usize {
        self.ensemble - self.x.count
    }

    /// Bloch estimate with the `e^{ε/2}` and `e^{ε}` corrections on x and y.
    pub fn estimate(&self, epsilon: f64) -> Result<EstimateTriple> {
        let z = self.z.mean("sigma_z")?;
        let x = self.x.mean("sigma_x")? * (epsilon / 2.0).exp();
        let y = (2.0 * self.y_plus as f64 / self.ensemble as f64 - 1.0) * epsilon.exp();
        Ok(BlochVector::estimate(x, y, z))
    }
}

/// Run the weak protocol once over the ensemble and return the tallies.
pub fn das_arvind_tallies(cfg: &TomographyConfig, stream: &mut RandomStream) -> Result<WeakTallies> {
    let mut tallies =
        WeakTallies { z: TallyPair::default(), x: TallyPair::default(), y_plus: 0, ensemble: cfg.ensemble };
    for _ in 0..cfg.ensemble {
        let (z_sample, rho1) = weak_measure(&cfg.state, cfg.epsilon, stream)?;
        tallies.z.record(&z_sample, cfg.binning, cfg.discard);

        let rho1_x = rho1.rotate(RotationSpec::X_TO_Z);
        let (x_sample, rho2_x) = weak_measure(&rho1_x, cfg.epsilon, stream)?;
        tallies.x.record(&x_sample, cfg.binning, cfg.discard);

        let rho2 = rho2_x.rotate(RotationSpec::X_TO_Z.inverse());
        let rho2_y = rho2.rotate(RotationSpec::Y_TO_Z);
        if projective_measure(&rho2_y, stream)? == Branch::Plus {
            tallies.y_plus += 1;
        }
    }
    Ok(tallies)
}

/// One repetition of the weak scheme.
pub fn das_arvind_run(cfg: &TomographyConfig, stream: &mut RandomStream) -> Result<EstimateTriple> {
    das_arvind_tallies(cfg, stream)?.estimate(cfg.epsilon)
}

/// One repetition of the projective three-basis scheme.
pub fn mub_projective_run(cfg: &TomographyConfig, stream: &mut RandomStream) -> Result<EstimateTriple> {
    if !cfg.ensemble.is_multiple_of(3) || cfg.ensemble == 0 {
        return Err(Error::InvalidConfig(format!(
            "projective scheme needs an ensemble divisible by 3, got {}",
            cfg.ensemble
        )));
    }
    let part = cfg.ensemble / 3;
    let mut component = |rho: DensityMatrix| -> Result<f64> {
        let mut plus = 0usize;
        for _ in 0..part {
            if projective_measure(&rho, stream)? == Branch::Plus {
                plus += 1;
            }
        }
        Ok(2.0 * plus as f64 / part as f64 - 1.0)
    };
    let z = component(cfg.state)?;
    let x = component(cfg.state.rotate(RotationSpec::X_TO_Z))?;
    let y = component(cfg.state.rotate(RotationSpec::Y_TO_Z))?;
    Ok(BlochVector::estimate(x, y, z))
}

pub fn run_scheme(cfg: &TomographyConfig, stream: &mut RandomStream) -> Result<EstimateTriple> {
    match cfg.scheme {
        Scheme::Weak => das_arvind_run(cfg, stream),
        Scheme::Projective => mub_projective_run(cfg, stream),
    }
}

/// `1 − |actual − estimate|²`. Unclamped; can be negative.
pub fn fidelity(actual: &BlochVector, estimate: &EstimateTriple) -> f64 {
    1.0 - actual.distance_squared(estimate)
}

/// Aggregate over the repetitions at one strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub mean: f64,
    /// Population standard deviation of the per-repetition fidelities.
    pub std_dev: f64,
    /// Repetitions excluded because every reading of an axis was discarded.
    pub failures: usize,
}

/// Per-repetition fidelities in repetition order; `None` marks a degenerate run.
///
/// Repetition `j` draws from stream `(cfg.seed, block, j)`.
pub fn repetition_fidelities(cfg: &TomographyConfig, block: u32) -> Result<Vec<Option<f64>>> {
    cfg.validate()?;
    let actual = cfg.state.bloch();
    (0..cfg.repetitions as u32)
        .into_par_iter()
        .map(|j| {
            let mut stream = RandomStream::derive(cfg.seed, block, j);
            match run_scheme(cfg, &mut stream) {
                Ok(est) => Ok(Some(fidelity(&actual, &est))),
                Err(Error::DegenerateRun { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Mean and population standard deviation, reduced in index order.
pub(crate) fn summarize(fidelities: &[Option<f64>]) -> Result<Score> {
    let valid: Vec<f64> = fidelities.iter().flatten().copied().collect();
    let failures = fidelities.len() - valid.len();
    if valid.is_empty() {
        return Err(Error::EmptyStatistics { repetitions: fidelities.len() });
    }
    let n = valid.len() as f64;
    let mean = valid.iter().sum::<f64>() / n;
    let var = valid.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>() / n;
    Ok(Score { mean, std_dev: var.sqrt(), failures })
}

/// Run the configured scheme `cfg.repetitions` times and score each estimate
/// against the true Bloch vector.
pub fn repeat_and_score(cfg: &TomographyConfig, block: u32) -> Result<Score> {
    summarize(&repetition_fidelities(cfg, block)?)
}

/// One grid point of a strength sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub mean_fidelity: f64,
    pub std_fidelity: f64,
    pub failures: usize,
}

/// Score the configuration at each strength of a strictly increasing grid.
/// Grid point `i` uses stream block `i`.
pub fn sweep(base: &TomographyConfig, grid: &[f64]) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("epsilon grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig("epsilon grid must be strictly increasing".into()));
    }
    if grid.len() > u32::MAX as usize {
        return Err(Error::InvalidConfig("epsilon grid too long".into()));
    }
    grid.iter()
        .enumerate()
        .map(|(i, &epsilon)| {
            let cfg = TomographyConfig { epsilon, ..base.clone() };
            let score = repeat_and_score(&cfg, i as u32)?;
            Ok(SweepRow {
                epsilon,
                mean_fidelity: score.mean,
                std_fidelity: score.std_dev,
                failures: score.failures,
            })
        })
        .collect()
}
