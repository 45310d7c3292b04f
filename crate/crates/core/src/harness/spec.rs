//! Experiment specifications: parsing of flags and `key = value` config text.

use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;

use super::output::format_g17;
use super::HarnessError;
use crate::state::{BlochVector, DensityMatrix};
use crate::tomography::{Binning, Scheme, TomographyConfig, DEFAULT_REPETITIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Trajectory,
    Sweep,
}

impl Mode {
    fn keys(self) -> &'static [&'static str] {
        match self {
            Mode::Trajectory => &["state", "seed", "threads", "out", "sigma", "steps"],
            Mode::Sweep => &[
                "state", "seed", "threads", "out", "ensemble", "epsilon", "reps", "discard", "scheme",
                "binning",
            ],
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Trajectory => "trajectory",
            Mode::Sweep => "sweep",
        })
    }
}

/// Initial state as written by the user: a Bloch triple or the four matrix
/// entries as eight reals `r00re,r00im,r01re,r01im,r10re,r10im,r11re,r11im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Bloch([f64; 3]),
    Matrix([f64; 8]),
}

impl StateSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        let values = text
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", t.trim())))
            .collect::<Result<Vec<_>, _>>()?;
        match values.len() {
            3 => Ok(StateSpec::Bloch([values[0], values[1], values[2]])),
            8 => {
                let mut m = [0.0; 8];
                m.copy_from_slice(&values);
                Ok(StateSpec::Matrix(m))
            }
            n => Err(format!("expected 3 (Bloch) or 8 (matrix) comma-separated reals, got {n}")),
        }
    }

    pub fn to_density(&self) -> crate::Result<DensityMatrix> {
        match *self {
            StateSpec::Bloch([x, y, z]) => DensityMatrix::from_bloch(&BlochVector::new(x, y, z)?),
            StateSpec::Matrix(m) => DensityMatrix::from_entries(
                Complex64::new(m[0], m[1]),
                Complex64::new(m[2], m[3]),
                Complex64::new(m[4], m[5]),
                Complex64::new(m[6], m[7]),
            ),
        }
    }

    /// Canonical text, parseable by [`StateSpec::parse`] to the same values.
    pub fn render(&self) -> String {
        let parts: Vec<String> = match self {
            StateSpec::Bloch(v) => v.iter().map(|&x| format_g17(x)).collect(),
            StateSpec::Matrix(m) => m.iter().map(|&x| format_g17(x)).collect(),
        };
        parts.join(",")
    }
}

/// Strength grid given as a single value, a comma list, or `start:stop:step`
/// (inclusive of `stop`).
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonGrid {
    text: String,
    values: Vec<f64>,
}

fn decimals(text: &str) -> Option<u32> {
    let t = text.trim();
    if t.contains(['e', 'E']) {
        return None;
    }
    Some(t.split_once('.').map_or(0, |(_, frac)| frac.len() as u32))
}

impl EpsilonGrid {
    pub fn parse(text: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", t.trim()));
        let values = if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            let [start, stop, step] = parts[..] else {
                return Err("range must be start:stop:step".into());
            };
            let (a, b, h) = (num(start)?, num(stop)?, num(step)?);
            if !(h > 0.0 && h.is_finite()) {
                return Err(format!("step must be positive, got {h}"));
            }
            if !(b >= a) {
                return Err(format!("stop {b} is below start {a}"));
            }
            let count = ((b - a) / h + 1e-9).floor() as usize + 1;
            // Snap to the decimal precision the user wrote so 0.1 + 3·0.05 prints as 0.25.
            let digits = [start, stop, step].iter().map(|t| decimals(t)).collect::<Option<Vec<_>>>();
            let snap = digits.and_then(|d| d.into_iter().max()).filter(|&d| d <= 15);
            (0..count)
                .map(|i| {
                    let v = a + i as f64 * h;
                    match snap {
                        Some(d) => {
                            let p = 10f64.powi(d as i32);
                            (v * p).round() / p
                        }
                        None => v,
                    }
                })
                .collect()
        } else {
            text.split(',').map(num).collect::<Result<Vec<_>, _>>()?
        };
        if values.is_empty() {
            return Err("grid is empty".into());
        }
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(format!("epsilon must be positive, got {bad}"));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err("grid must be strictly increasing".into());
        }
        Ok(Self { text: text.trim().to_string(), values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModeSpec {
    Trajectory {
        sigma: f64,
        steps: usize,
    },
    Sweep {
        ensemble: usize,
        grid: EpsilonGrid,
        repetitions: usize,
        discard: f64,
        scheme: Scheme,
        binning: Binning,
    },
}

/// Fully validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub state: StateSpec,
    pub seed: u64,
    /// Worker count; `None` means the available parallelism.
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub mode: ModeSpec,
}

impl ExperimentSpec {
    pub fn mode(&self) -> Mode {
        match self.mode {
            ModeSpec::Trajectory { .. } => Mode::Trajectory,
            ModeSpec::Sweep { .. } => Mode::Sweep,
        }
    }

    pub fn density(&self) -> DensityMatrix {
        self.state.to_density().expect("validated at parse time")
    }

    /// Base tomography config for a sweep, at the first grid strength.
    pub fn tomography_config(&self) -> Option<TomographyConfig> {
        match &self.mode {
            ModeSpec::Sweep { ensemble, grid, repetitions, discard, scheme, binning } => {
                Some(TomographyConfig {
                    state: self.density(),
                    ensemble: *ensemble,
                    epsilon: grid.values()[0],
                    discard: *discard,
                    scheme: *scheme,
                    binning: *binning,
                    repetitions: *repetitions,
                    seed: self.seed,
                })
            }
            ModeSpec::Trajectory { .. } => None,
        }
    }

    /// Config keys that reproduce this spec when parsed again.
    pub fn config_echo(&self) -> Vec<(String, String)> {
        let mut kv = vec![("state".to_string(), self.state.render())];
        match &self.mode {
            ModeSpec::Trajectory { sigma, steps } => {
                kv.push(("sigma".into(), format_g17(*sigma)));
                kv.push(("steps".into(), steps.to_string()));
            }
            ModeSpec::Sweep { ensemble, grid, repetitions, discard, scheme, binning } => {
                kv.push(("ensemble".into(), ensemble.to_string()));
                kv.push(("epsilon".into(), grid.text().to_string()));
                kv.push(("reps".into(), repetitions.to_string()));
                kv.push(("discard".into(), format_g17(*discard)));
                kv.push(("scheme".into(), scheme.to_string()));
                kv.push(("binning".into(), binning.to_string()));
            }
        }
        kv.push(("seed".into(), self.seed.to_string()));
        kv.push(("out".into(), self.out.display().to_string()));
        kv
    }
}

/// Parse `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, HarnessError> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(HarnessError::Syntax { line: lineno + 1, text: raw.to_string() });
        };
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

fn invalid(key: &str, message: impl Into<String>) -> HarnessError {
    HarnessError::InvalidValue { key: key.to_string(), message: message.into() }
}

/// Build a validated spec from `key = value` entries.
///
/// Later entries override earlier ones, so callers pass config-file entries
/// first and command-line flags after them. `env_seed` is consulted only when
/// no `seed` entry is present; without either the seed is 0.
pub fn parse_spec(
    mode: Mode,
    entries: &[(String, String)],
    env_seed: Option<&str>,
) -> Result<ExperimentSpec, HarnessError> {
    let allowed = mode.keys();
    let mut map: Vec<(&str, &str)> = Vec::new();
    for (k, v) in entries {
        if !allowed.contains(&k.as_str()) {
            return Err(HarnessError::UnknownKey { key: k.clone(), mode });
        }
        map.retain(|(existing, _)| existing != k);
        map.push((k.as_str(), v.as_str()));
    }
    let get = |key: &str| map.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    let require = |key: &'static str| get(key).ok_or(HarnessError::MissingKey { key, mode });

    fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, HarnessError> {
        v.trim().parse::<T>().map_err(|_| invalid(key, format!("`{v}` is not a valid number")))
    }

    let state_text = require("state")?;
    let state = StateSpec::parse(state_text).map_err(|m| invalid("state", m))?;
    state.to_density().map_err(|e| invalid("state", e.to_string()))?;

    let seed = match get("seed") {
        Some(v) => parse_num::<u64>("seed", v)?,
        None => match env_seed {
            Some(v) => parse_num::<u64>("QTOMO_SEED", v)?,
            None => 0,
        },
    };
    let threads = match get("threads") {
        Some(v) => {
            let t = parse_num::<usize>("threads", v)?;
            if t == 0 {
                return Err(invalid("threads", "must be at least 1"));
            }
            Some(t)
        }
        None => None,
    };
    let out = PathBuf::from(require("out")?);

    let spec_mode = match mode {
        Mode::Trajectory => {
            let sigma = parse_num::<f64>("sigma", require("sigma")?)?;
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(invalid("sigma", format!("must be positive, got {sigma}")));
            }
            let steps = parse_num::<usize>("steps", require("steps")?)?;
            if steps == 0 {
                return Err(invalid("steps", "must be at least 1"));
            }
            ModeSpec::Trajectory { sigma, steps }
        }
        Mode::Sweep => {
            let ensemble = parse_num::<usize>("ensemble", require("ensemble")?)?;
            let grid = EpsilonGrid::parse(require("epsilon")?).map_err(|m| invalid("epsilon", m))?;
            let repetitions = match get("reps") {
                Some(v) => parse_num::<usize>("reps", v)?,
                None => DEFAULT_REPETITIONS,
            };
            let discard = match get("discard") {
                Some(v) => parse_num::<f64>("discard", v)?,
                None => 0.0,
            };
            let scheme = match get("scheme") {
                Some(v) => v.parse::<Scheme>().map_err(|e| invalid("scheme", e.to_string()))?,
                None => Scheme::Weak,
            };
            let binning = match get("binning") {
                Some(v) => v.parse::<Binning>().map_err(|e| invalid("binning", e.to_string()))?,
                None => Binning::Signed,
            };
            ModeSpec::Sweep { ensemble, grid, repetitions, discard, scheme, binning }
        }
    };

    let spec = ExperimentSpec { state, seed, threads, out, mode: spec_mode };
    if let Some(cfg) = spec.tomography_config() {
        cfg.validate().map_err(|e| {
            let key = match &e {
                crate::Error::InvalidConfig(m) if m.contains("ensemble") || m.contains("divisible") => {
                    "ensemble"
                }
                crate::Error::InvalidConfig(m) if m.contains("discard") => "discard",
                crate::Error::InvalidConfig(m) if m.contains("repetitions") => "reps",
                _ => "config",
            };
            invalid(key, e.to_string())
        })?;
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    fn sweep_entries() -> Vec<(String, String)> {
        kv(&[("state", "0,0,1"), ("ensemble", "30"), ("epsilon", "0.4"), ("out", "x.csv")])
    }

    #[test]
    fn bloch_state_and_defaults() {
        let spec = parse_spec(Mode::Sweep, &sweep_entries(), None).unwrap();
        assert_eq!(spec.density(), DensityMatrix::ground());
        assert_eq!(spec.seed, 0);
        let ModeSpec::Sweep { repetitions, discard, scheme, binning, .. } = spec.mode else {
            panic!("sweep expected")
        };
        assert_eq!((repetitions, discard, scheme, binning), (100_000, 0.0, Scheme::Weak, Binning::Signed));
    }

    #[test]
    fn matrix_state() {
        let mut e = sweep_entries();
        e[0].1 = "0.5,0,0.5,0,0.5,0,0.5,0".into();
        let spec = parse_spec(Mode::Sweep, &e, None).unwrap();
        let b = spec.density().bloch();
        assert!((b.x - 1.0).abs() < 1e-15 && b.y.abs() < 1e-15 && b.z.abs() < 1e-15);
    }

    #[test]
    fn projective_divisibility_error() {
        let mut e = sweep_entries();
        e[1].1 = "31".into();
        e.push(("scheme".into(), "projective".into()));
        match parse_spec(Mode::Sweep, &e, None) {
            Err(HarnessError::InvalidValue { key, message }) => {
                assert_eq!(key, "ensemble");
                assert!(message.contains("divisible"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn range_grid_has_nineteen_points() {
        let g = EpsilonGrid::parse("0.1:1.0:0.05").unwrap();
        assert_eq!(g.values().len(), 19);
        assert_eq!(g.values()[3], 0.25);
        assert_eq!(*g.values().last().unwrap(), 1.0);
        assert_eq!(EpsilonGrid::parse("0.2,0.4").unwrap().values(), &[0.2, 0.4]);
        assert!(EpsilonGrid::parse("0.4,0.2").is_err());
        assert!(EpsilonGrid::parse("0:1:0.5").is_err());
        assert!(EpsilonGrid::parse("1:0.5:0.1").is_err());
        assert!(EpsilonGrid::parse("0.1:1.0").is_err());
    }

    #[test]
    fn errors_name_the_key() {
        let mut e = sweep_entries();
        e.push(("colour".into(), "red".into()));
        assert!(
            matches!(parse_spec(Mode::Sweep, &e, None), Err(HarnessError::UnknownKey { key, .. }) if key == "colour")
        );

        let e = kv(&[("state", "0,0,1"), ("epsilon", "0.4"), ("out", "x.csv")]);
        assert!(matches!(
            parse_spec(Mode::Sweep, &e, None),
            Err(HarnessError::MissingKey { key: "ensemble", .. })
        ));

        let mut e = sweep_entries();
        e[0].1 = "1,1,1".into();
        assert!(
            matches!(parse_spec(Mode::Sweep, &e, None), Err(HarnessError::InvalidValue { key, .. }) if key == "state")
        );

        let mut e = sweep_entries();
        e.push(("sigma".into(), "5".into()));
        assert!(matches!(parse_spec(Mode::Sweep, &e, None), Err(HarnessError::UnknownKey { .. })));
    }

    #[test]
    fn later_entries_win_and_env_seed_fallback() {
        let mut e = sweep_entries();
        e.push(("ensemble".into(), "60".into()));
        let spec = parse_spec(Mode::Sweep, &e, Some("9")).unwrap();
        assert_eq!(spec.tomography_config().unwrap().ensemble, 60);
        assert_eq!(spec.seed, 9);
        e.push(("seed".into(), "4".into()));
        assert_eq!(parse_spec(Mode::Sweep, &e, Some("9")).unwrap().seed, 4);
        assert!(parse_spec(Mode::Sweep, &sweep_entries(), Some("x")).is_err());
    }

    #[test]
    fn trajectory_spec() {
        let e = kv(&[("state", "1,0,0"), ("sigma", "5"), ("steps", "100"), ("out", "t.csv")]);
        let spec = parse_spec(Mode::Trajectory, &e, None).unwrap();
        assert_eq!(spec.mode, ModeSpec::Trajectory { sigma: 5.0, steps: 100 });
        let e = kv(&[("state", "1,0,0"), ("sigma", "0"), ("steps", "100"), ("out", "t.csv")]);
        assert!(parse_spec(Mode::Trajectory, &e, None).is_err());
    }

    #[test]
    fn config_text_and_echo_round_trip() {
        let text = "# comment\nstate = -0.385, -0.042, 0.399\nensemble = 30\n\nepsilon = 0.1:1.0:0.05\nout = a.csv\nseed=12\n";
        let entries = parse_config_text(text).unwrap();
        let spec = parse_spec(Mode::Sweep, &entries, None).unwrap();
        let again = parse_spec(Mode::Sweep, &spec.config_echo(), None).unwrap();
        assert_eq!(spec, again);
        assert!(matches!(parse_config_text("state 0,0,1"), Err(HarnessError::Syntax { line: 1, .. })));
    }
}
