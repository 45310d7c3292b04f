#![allow(dead_code)]

use num_complex::Complex64;
use qtomo::{BlochVector, DensityMatrix, RandomStream};

/// The randomly generated test state with Bloch vector (−0.385, −0.042, 0.399).
pub fn rho_a() -> DensityMatrix {
    DensityMatrix::from_entries(
        Complex64::new(1.399 / 2.0, 0.0),
        Complex64::new(-0.385 / 2.0, 0.042 / 2.0),
        Complex64::new(-0.385 / 2.0, -0.042 / 2.0),
        Complex64::new(0.601 / 2.0, 0.0),
    )
    .unwrap()
}

pub const RHO_A_BLOCH: [f64; 3] = [-0.385, -0.042, 0.399];

/// Every entry 1/2: the +x eigenstate.
pub fn rho_b() -> DensityMatrix {
    DensityMatrix::from_bloch(&BlochVector::new(1.0, 0.0, 0.0).unwrap()).unwrap()
}

/// Uniform sample from the solid Bloch ball.
pub fn random_ball_point(s: &mut RandomStream) -> BlochVector {
    loop {
        let (x, y, z) = (2.0 * s.uniform() - 1.0, 2.0 * s.uniform() - 1.0, 2.0 * s.uniform() - 1.0);
        if x * x + y * y + z * z <= 1.0 {
            return BlochVector::new(x, y, z).unwrap();
        }
    }
}

/// Uniform sample from the Bloch sphere surface (pure states).
pub fn random_sphere_point(s: &mut RandomStream) -> BlochVector {
    loop {
        let v = random_ball_point(s);
        let n = v.norm();
        if n > 1e-3 {
            let (x, y, z) = (v.x / n, v.y / n, v.z / n);
            let renorm = (x * x + y * y + z * z).sqrt();
            return BlochVector::new(x / renorm, y / renorm, z / renorm)
                .unwrap_or_else(|_| BlochVector::new(0.0, 0.0, 1.0).unwrap());
        }
    }
}

/// Literal scalar evaluation of the population and coherence update rules,
/// written directly from the likelihood formulas. Returns `(p00, p11, r01)`.
/// Populations below 1e−14 are snapped to the pole, the documented convention.
pub fn oracle_update(p00: f64, p11: f64, r01: Complex64, m: f64, sigma: f64) -> (f64, f64, Complex64) {
    let norm = 1.0 / (2.0 * sigma * sigma * std::f64::consts::PI).sqrt();
    let pm0 = norm * (-(m - 1.0) * (m - 1.0) / (2.0 * sigma * sigma)).exp();
    let pm1 = norm * (-(m + 1.0) * (m + 1.0) / (2.0 * sigma * sigma)).exp();
    let pm = p00 * pm0 + p11 * pm1;
    let n00 = p00 * pm0 / pm;
    let n11 = p11 * pm1 / pm;
    if n00 < 1e-14 {
        return (0.0, 1.0, Complex64::new(0.0, 0.0));
    }
    if n11 < 1e-14 {
        return (1.0, 0.0, Complex64::new(0.0, 0.0));
    }
    let n01 = r01 * ((n00 * n11) / (p00 * p11)).sqrt();
    (n00, n11, n01)
}

/// Standard normal CDF.
pub fn phi(x: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// Two-sided Kolmogorov–Smirnov 1% critical value, asymptotic form.
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    1.628 * (((n + m) as f64) / (n as f64 * m as f64)).sqrt()
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
