//! CSV and manifest serialisation.

use std::io::{self, Write};

use crate::measurement::Trajectory;
use crate::tomography::SweepRow;

pub const SWEEP_HEADER: &str = "epsilon,fidelity,std_dev";
pub const TRAJECTORY_HEADER: &str = "t,p00,p11";

/// Shortest-form rendering with 17 significant digits, the same text C's
/// `printf("%.17g")` produces. Every finite double round-trips through it.
pub fn format_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{}",
            format_g17(row.epsilon),
            format_g17(row.mean_fidelity),
            format_g17(row.std_fidelity)
        )?;
    }
    out.flush()
}

pub fn write_trajectory_csv<W: Write>(trajectory: &Trajectory, mut out: W) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for (t, rho) in trajectory.states().iter().enumerate() {
        writeln!(out, "{t},{},{}", format_g17(rho.p00()), format_g17(rho.p11()))?;
    }
    out.flush()
}

/// Key-value run record written beside each CSV.
///
/// `config` lines are plain `key = value` pairs that can be fed back through
/// `--config` to reproduce the run; `info` lines are written as comments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub info: Vec<(String, String)>,
    pub config: Vec<(String, String)>,
}

impl Manifest {
    pub fn render(&self) -> String {
        let mut s = String::from("# qtomo run manifest\n");
        for (k, v) in &self.info {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        for (k, v) in &self.config {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}
