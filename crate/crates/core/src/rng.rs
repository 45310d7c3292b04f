//! Seedable random streams.
//!
//! A [`RandomStream`] is a ChaCha8 keystream selected by `(seed, stream_id)`.
//! Distinct stream ids give independent, non-overlapping sequences, so every
//! repetition of an experiment can own its stream and the results do not depend
//! on scheduling.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Tolerance on coin probabilities before they are treated as out of range.
const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Mean and spread of a pointer Gaussian, in meter units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    mu: f64,
    sigma: f64,
}

impl GaussianSpec {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidSigma(sigma));
        }
        Ok(Self { mu, sigma })
    }

    /// Spread derived from a measurement strength, `σ = 1/√ε`.
    pub fn from_strength(mu: f64, epsilon: f64) -> Result<Self> {
        Self::new(mu, sigma_from_strength(epsilon)?)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// `σ = 1/√ε`.
pub fn sigma_from_strength(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidStrength(epsilon));
    }
    Ok(1.0 / epsilon.sqrt())
}

/// Result of a biased coin toss: which pointer Gaussian (eigenbranch) was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Outcome `|0⟩`, Gaussian mean +1.
    Plus,
    /// Outcome `|1⟩`, Gaussian mean −1.
    Minus,
}

impl Branch {
    pub fn eigenvalue(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Single-owner deterministic random source.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
    seed: u64,
    stream_id: u64,
    // Second output of the last polar acceptance, served before drawing again.
    spare_normal: Option<f64>,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { rng, seed, stream_id, spare_normal: None }
    }

    /// Stream id for `(block, index)` pairs such as (grid point, repetition).
    pub fn derive(seed: u64, block: u32, index: u32) -> Self {
        Self::new(seed, (u64::from(block) << 32) | u64::from(index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate by the Marsaglia polar method. Both outputs of
    /// an accepted pair are used before a new pair is drawn.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let v1 = 2.0 * self.uniform() - 1.0;
            let v2 = 2.0 * self.uniform() - 1.0;
            let s = v1 * v1 + v2 * v2;
            if s < 1.0 && s != 0.0 {
                let scale = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v2 * scale);
                return v1 * scale;
            }
        }
    }

    pub fn gaussian(&mut self, g: &GaussianSpec) -> f64 {
        g.sigma * self.standard_normal() + g.mu
    }

    /// `Plus` when a uniform draw `r` satisfies `r ≤ p`, else `Minus`.
    ///
    /// `p` slightly outside `[0, 1]` (within 1e−12) is clamped.
    pub fn cointoss(&mut self, p: f64) -> Result<Branch> {
        if !(-PROBABILITY_TOLERANCE..=1.0 + PROBABILITY_TOLERANCE).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        let p = p.clamp(0.0, 1.0);
        let r = self.uniform();
        Ok(if r <= p { Branch::Plus } else { Branch::Minus })
    }
}
