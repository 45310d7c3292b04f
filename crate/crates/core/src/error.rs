use thiserror::Error;

/// Errors raised by the simulation layers. The CLI wraps these in
/// [`crate::harness::HarnessError`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("Bloch vector lies outside the unit sphere (|v| = {norm})")]
    OutOfSphere { norm: f64 },
    #[error("pointer spread must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("measurement strength must be positive and finite, got {0}")]
    InvalidStrength(f64),
    #[error("probability {0} lies outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate run: every {component} reading fell inside the discard region")]
    DegenerateRun { component: &'static str },
    #[error("all {repetitions} repetitions were degenerate; no statistics available")]
    EmptyStatistics { repetitions: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
