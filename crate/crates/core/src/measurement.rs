//! Two-Gaussian pointer model: weak measurements along z with a Bayesian
//! state update, projective measurements, and quantum trajectories.
//!
//! The eigenvalues are fixed at ±1, so a reading `M` is drawn from
//! `N(+1, σ)` for the `|0⟩` branch and `N(−1, σ)` for `|1⟩`. Every
//! measurement acts along the z axis of the state it is given; callers rotate
//! the state first to measure along another axis.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::{sigma_from_strength, GaussianSpec, RandomStream};
use crate::state::DensityMatrix;

pub use crate::rng::Branch;

/// Populations below this are snapped to the pole; the coherence update is
/// `0/0` there and the physical limit is the absorbed eigenstate.
pub const POLE_THRESHOLD: f64 = 1e-14;

/// One weak-measurement record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerSample {
    pub branch: Branch,
    /// Meter reading.
    pub reading: f64,
    pub sigma: f64,
}

impl PointerSample {
    /// Whether the reading lies outside the discard region `(−a, a)`.
    pub fn is_valid(&self, discard: f64) -> bool {
        self.reading >= discard || self.reading <= -discard
    }
}

/// `P(M | branch)` for a Gaussian pointer of spread `sigma` centred on the
/// branch eigenvalue. `sigma` must be positive.
pub fn likelihood(reading: f64, branch: Branch, sigma: f64) -> f64 {
    let d = reading - branch.eigenvalue();
    (-d * d / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).sqrt()
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSigma(sigma))
    }
}

fn snap_to_pole(rho: &DensityMatrix) -> Option<DensityMatrix> {
    if rho.p00() < POLE_THRESHOLD {
        Some(DensityMatrix::excited())
    } else if rho.p11() < POLE_THRESHOLD {
        Some(DensityMatrix::ground())
    } else {
        None
    }
}

/// Bayesian update of `rho` after reading `M` with pointer spread `sigma`.
///
/// Populations are re-weighted by the branch likelihoods and the coherence is
/// scaled by `sqrt(p00'·p11' / (p00·p11))`, which keeps
/// `|r01| / sqrt(p00·p11)` fixed. States at (or driven to) a pole are
/// snapped onto it.
pub fn bayesian_update(rho: &DensityMatrix, reading: f64, sigma: f64) -> Result<DensityMatrix> {
    check_sigma(sigma)?;
    if let Some(pole) = snap_to_pole(rho) {
        return Ok(pole);
    }
    if !reading.is_finite() {
        return Err(Error::InvalidConfig(format!("non-finite meter reading {reading}")));
    }
    let (p00, p11) = (rho.p00(), rho.p11());
    // log P(M|1) − log P(M|0) = −2M/σ²; normalise against the larger weight.
    let log_ratio = -2.0 * reading / (sigma * sigma);
    let (w0, w1) =
        if log_ratio <= 0.0 { (p00, p11 * log_ratio.exp()) } else { (p00 * (-log_ratio).exp(), p11) };
    let total = w0 + w1;
    let (n00, n11) = (w0 / total, w1 / total);
    let updated = DensityMatrix::from_parts(n00, rho.p01(), n11);
    if let Some(pole) = snap_to_pole(&updated) {
        return Ok(pole);
    }
    let scale = ((n00 * n11) / (p00 * p11)).sqrt();
    Ok(DensityMatrix::from_parts(n00, rho.p01() * scale, n11))
}

fn measure_with_sigma(
    rho: &DensityMatrix,
    sigma: f64,
    stream: &mut RandomStream,
) -> Result<(PointerSample, DensityMatrix)> {
    let branch = stream.cointoss(rho.p00())?;
    let pointer = GaussianSpec::new(branch.eigenvalue(), sigma)?;
    let reading = stream.gaussian(&pointer);
    let posterior = bayesian_update(rho, reading, sigma)?;
    Ok((PointerSample { branch, reading, sigma }, posterior))
}

/// Weak σz measurement of strength `epsilon` (`σ = 1/√ε`): toss the biased
/// coin for the branch, draw the reading from that branch's Gaussian, then
/// update the state on the reading.
pub fn weak_measure(
    rho: &DensityMatrix,
    epsilon: f64,
    stream: &mut RandomStream,
) -> Result<(PointerSample, DensityMatrix)> {
    measure_with_sigma(rho, sigma_from_strength(epsilon)?, stream)
}

/// Projective σz measurement. The post-measurement state is not returned.
pub fn projective_measure(rho: &DensityMatrix, stream: &mut RandomStream) -> Result<Branch> {
    stream.cointoss(rho.p00())
}

/// Sequence `ρ(0), ρ(1), …, ρ(N)` of states under repeated weak measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// Number of measurements performed, `N`.
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn initial(&self) -> &DensityMatrix {
        &self.states[0]
    }

    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    /// See [`collapse_time`].
    pub fn collapse_time(&self, threshold: f64) -> Result<Option<usize>> {
        collapse_time(&self.states, threshold)
    }
}

/// Run `steps` successive weak measurements of spread `sigma` from `initial`.
pub fn trajectory(
    initial: &DensityMatrix,
    sigma: f64,
    steps: usize,
    stream: &mut RandomStream,
) -> Result<Trajectory> {
    check_sigma(sigma)?;
    if steps == 0 {
        return Err(Error::InvalidConfig("trajectory needs at least one step".into()));
    }
    let mut states = Vec::with_capacity(steps + 1);
    let mut rho = *initial;
    states.push(rho);
    for _ in 0..steps {
        rho = measure_with_sigma(&rho, sigma, stream)?.1;
        states.push(rho);
    }
    Ok(Trajectory { states })
}

/// First step from which `p00` stays at or beyond `threshold` (or at or below
/// `1 − threshold`) for the rest of the record. `None` if the final state is
/// not collapsed.
pub fn collapse_time(states: &[DensityMatrix], threshold: f64) -> Result<Option<usize>> {
    if !(threshold > 0.5 && threshold < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "collapse threshold must lie in (0.5, 1), got {threshold}"
        )));
    }
    let collapsed = |rho: &DensityMatrix| rho.p00() >= threshold || rho.p00() <= 1.0 - threshold;
    let unresolved_tail = states.iter().rev().take_while(|rho| collapsed(rho)).count();
    Ok((unresolved_tail > 0).then(|| states.len() - unresolved_tail))
}
