//! Single-qubit density matrices, Bloch vectors and Pauli-axis rotations.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance used for every structural check on a density matrix.
pub const STATE_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Point in (or, for estimates, near) the Bloch ball.
///
/// Vectors built with [`BlochVector::new`] are checked to lie inside the unit
/// sphere and are flagged physical. Tomography estimates are built with
/// [`BlochVector::estimate`], which skips the norm check: the correction
/// factors in the weak protocol can push an estimate outside the sphere and
/// fidelity is scored on the raw estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    physical: bool,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z, physical: true };
        let norm = v.norm();
        if !norm.is_finite() || norm * norm > 1.0 + STATE_TOLERANCE {
            return Err(Error::OutOfSphere { norm });
        }
        Ok(v)
    }

    pub fn estimate(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z, physical: false }
    }

    /// Whether the producer vouched for this vector being a physical state.
    pub fn is_physical(&self) -> bool {
        self.physical
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn distance_squared(&self, other: &BlochVector) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// A rotation about the x or y axis, with the angle in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSpec {
    pub axis: Axis,
    pub angle_deg: f64,
}

impl RotationSpec {
    pub const fn new(axis: Axis, angle_deg: f64) -> Self {
        Self { axis, angle_deg }
    }

    /// `R_y(-90°)`: brings the x axis of the Bloch sphere onto the z axis.
    pub const X_TO_Z: RotationSpec = RotationSpec::new(Axis::Y, -90.0);
    /// `R_x(90°)`: brings the y axis of the Bloch sphere onto the z axis.
    pub const Y_TO_Z: RotationSpec = RotationSpec::new(Axis::X, 90.0);

    /// The rotation whose conjugation undoes this one (`R(θ)† = R(−θ)`).
    pub fn inverse(self) -> Self {
        Self { axis: self.axis, angle_deg: -self.angle_deg }
    }

    /// The 2×2 unitary, row-major.
    pub fn unitary(&self) -> [[Complex64; 2]; 2] {
        let half = self.angle_deg.to_radians() / 2.0;
        let (s, c) = half.sin_cos();
        let c = Complex64::new(c, 0.0);
        match self.axis {
            Axis::X => {
                let off = -I * s;
                [[c, off], [off, c]]
            }
            Axis::Y => {
                let s = Complex64::new(s, 0.0);
                [[c, -s], [s, c]]
            }
        }
    }
}

/// Structural report on a candidate density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `|r00 + r11 − 1|`.
    pub trace_error: f64,
    /// Largest deviation from Hermiticity: `|r10 − conj(r01)|` or an imaginary diagonal part.
    pub hermiticity_error: f64,
    /// `r00·r11 − |r01|²`; negative means the matrix is not positive semidefinite.
    pub positivity_margin: f64,
    /// Distance of the diagonal entries outside `[0, 1]` (zero when inside).
    pub population_excess: f64,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.trace_error <= STATE_TOLERANCE
            && self.hermiticity_error <= STATE_TOLERANCE
            && self.positivity_margin >= -STATE_TOLERANCE
            && self.population_excess <= STATE_TOLERANCE
    }

    fn describe(&self) -> String {
        let mut problems = Vec::new();
        if !(self.trace_error <= STATE_TOLERANCE) {
            problems.push(format!("trace error {:e}", self.trace_error));
        }
        if !(self.hermiticity_error <= STATE_TOLERANCE) {
            problems.push(format!("hermiticity error {:e}", self.hermiticity_error));
        }
        if !(self.positivity_margin >= -STATE_TOLERANCE) {
            problems.push(format!("positivity margin {:e}", self.positivity_margin));
        }
        if !(self.population_excess <= STATE_TOLERANCE) {
            problems.push(format!("population outside [0,1] by {:e}", self.population_excess));
        }
        problems.join(", ")
    }
}

/// Diagnose four raw matrix entries without constructing a state.
pub fn validate(r00: Complex64, r01: Complex64, r10: Complex64, r11: Complex64) -> Diagnostics {
    let trace_error = (r00.re + r11.re - 1.0).abs();
    let hermiticity_error = (r10 - r01.conj()).norm().max(r00.im.abs()).max(r11.im.abs());
    let positivity_margin = r00.re * r11.re - r01.norm_sqr();
    let excess = |p: f64| {
        if p < 0.0 {
            -p
        } else if p > 1.0 {
            p - 1.0
        } else if p.is_nan() {
            f64::INFINITY
        } else {
            0.0
        }
    };
    let population_excess = excess(r00.re).max(excess(r11.re));
    let nan_guard = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    Diagnostics {
        trace_error: nan_guard(trace_error),
        hermiticity_error: nan_guard(hermiticity_error),
        positivity_margin: if positivity_margin.is_nan() { f64::NEG_INFINITY } else { positivity_margin },
        population_excess,
    }
}

/// A qubit density matrix `ρ`.
///
/// Only the upper triangle is stored; `r10` is always `conj(r01)` and the
/// diagonal is real, so Hermiticity holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    p00: f64,
    p01: Complex64,
    p11: f64,
}

impl DensityMatrix {
    /// Build from the four entries, rejecting anything that is not a valid
    /// state within [`STATE_TOLERANCE`].
    pub fn from_entries(r00: Complex64, r01: Complex64, r10: Complex64, r11: Complex64) -> Result<Self> {
        let diag = validate(r00, r01, r10, r11);
        if !diag.is_valid() {
            return Err(Error::InvalidState(diag.describe()));
        }
        Ok(Self { p00: r00.re, p01: (r01 + r10.conj()) * 0.5, p11: r11.re })
    }

    /// `ρ = (I + xσx + yσy + zσz) / 2`.
    pub fn from_bloch(v: &BlochVector) -> Result<Self> {
        let v = BlochVector::new(v.x, v.y, v.z)?;
        Ok(Self {
            p00: 0.5 * (1.0 + v.z),
            p01: Complex64::new(0.5 * v.x, -0.5 * v.y),
            p11: 0.5 * (1.0 - v.z),
        })
    }

    /// `|0⟩⟨0|`, the +1 eigenstate of σz.
    pub fn ground() -> Self {
        Self { p00: 1.0, p01: ZERO, p11: 0.0 }
    }

    /// `|1⟩⟨1|`, the −1 eigenstate of σz.
    pub fn excited() -> Self {
        Self { p00: 0.0, p01: ZERO, p11: 1.0 }
    }

    pub fn maximally_mixed() -> Self {
        Self { p00: 0.5, p01: ZERO, p11: 0.5 }
    }

    /// Internal constructor for update rules that preserve validity themselves.
    pub(crate) fn from_parts(p00: f64, p01: Complex64, p11: f64) -> Self {
        Self { p00, p01, p11 }
    }

    pub fn p00(&self) -> f64 {
        self.p00
    }

    pub fn p11(&self) -> f64 {
        self.p11
    }

    pub fn p01(&self) -> Complex64 {
        self.p01
    }

    pub fn p10(&self) -> Complex64 {
        self.p01.conj()
    }

    pub fn trace(&self) -> f64 {
        self.p00 + self.p11
    }

    /// Row-major `[[r00, r01], [r10, r11]]`.
    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        [[Complex64::new(self.p00, 0.0), self.p01], [self.p10(), Complex64::new(self.p11, 0.0)]]
    }

    /// `(r01 + r10, i(r01 − r10), r00 − r11)`.
    pub fn bloch(&self) -> BlochVector {
        let x = self.p01 + self.p10();
        let y = I * (self.p01 - self.p10());
        BlochVector { x: x.re, y: y.re, z: self.p00 - self.p11, physical: true }
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let [[r00, r01], [r10, r11]] = self.entries();
        validate(r00, r01, r10, r11)
    }

    /// Purity-independent coherence ratio `|r01| / sqrt(r00·r11)`; `None` at the poles.
    pub fn coherence_ratio(&self) -> Option<f64> {
        let pop = self.p00 * self.p11;
        (pop > 0.0).then(|| self.p01.norm() / pop.sqrt())
    }

    /// `U ρ U†` for an arbitrary 2×2 unitary.
    pub fn conjugate_by(&self, u: &[[Complex64; 2]; 2]) -> Self {
        let rho = self.entries();
        let mut tmp = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                tmp[i][j] = u[i][0] * rho[0][j] + u[i][1] * rho[1][j];
            }
        }
        let mut out = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = tmp[i][0] * u[j][0].conj() + tmp[i][1] * u[j][1].conj();
            }
        }
        Self { p00: out[0][0].re, p01: (out[0][1] + out[1][0].conj()) * 0.5, p11: out[1][1].re }
    }

    /// Conjugate by the rotation's unitary: `R ρ R†`.
    pub fn rotate(&self, r: RotationSpec) -> Self {
        self.conjugate_by(&r.unitary())
    }
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.p00, self.p01, self.p10(), self.p11)
    }
}
