//! Monte Carlo simulation of weak and projective measurements on a single qubit.
//!
//! The crate is organised bottom-up:
//!
//! - [`state`]: exact 2×2 density-matrix algebra, Bloch conversions and Pauli-axis rotations.
//! - [`rng`]: seedable random streams with a Marsaglia-polar Gaussian source and a biased coin.
//! - [`measurement`]: the two-Gaussian pointer model, Bayesian state updates and trajectories.
//! - [`tomography`]: the weak z/x + projective y protocol, the projective three-basis baseline,
//!   fidelity scoring and strength sweeps.
//! - [`harness`]: experiment specs, CSV/manifest output and the orchestration behind the `qtomo`
//!   binary.
//!
//! Every random quantity is drawn from a [`rng::RandomStream`] keyed by a master seed and a
//! stream id, so any run can be reproduced bit for bit regardless of worker count.

// Parameter guards are written `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod measurement;
pub mod rng;
pub mod state;
pub mod tomography;

pub use error::{Error, Result};
pub use measurement::{Branch, PointerSample, Trajectory};
pub use rng::{GaussianSpec, RandomStream};
pub use state::{Axis, BlochVector, DensityMatrix, Diagnostics, RotationSpec};
pub use tomography::{Binning, EstimateTriple, Scheme, SweepRow, TomographyConfig};
