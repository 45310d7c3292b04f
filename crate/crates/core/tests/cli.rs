use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qtomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtomo"))
        .args(args)
        .env_remove("QTOMO_SEED")
        .output()
        .expect("spawn qtomo")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn path_str(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn trajectory_from_pole_is_constant() {
    let dir = TempDir::new().unwrap();
    let out = path_str(&dir, "traj.csv");
    ok(&qtomo(&["trajectory", "--state", "0,0,1", "--sigma", "5", "--steps", "100", "--out", &out]));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("t,p00,p11"));
    let r = rows(Path::new(&out));
    assert_eq!(r.len(), 101);
    assert!(r.iter().all(|row| row[1] == 1.0 && row[2] == 0.0));
}

#[test]
fn trajectory_collapses_and_conserves_trace() {
    let dir = TempDir::new().unwrap();
    let out = path_str(&dir, "traj.csv");
    ok(&qtomo(&[
        "trajectory",
        "--state",
        "1,0,0",
        "--sigma",
        "5",
        "--steps",
        "5000",
        "--seed",
        "3",
        "--out",
        &out,
    ]));
    let r = rows(Path::new(&out));
    assert!(r.iter().enumerate().all(|(i, row)| row[0] == i as f64));
    assert!(r.iter().all(|row| (row[1] + row[2] - 1.0).abs() <= 1e-12));
    let last = r.last().unwrap()[1];
    assert!(!(0.01..=0.99).contains(&last), "final p00 {last}");
    let manifest = fs::read_to_string(format!("{out}.manifest.txt")).unwrap();
    assert!(manifest.contains("collapse_time_0.99"));
}

#[test]
fn single_repetition_has_zero_spread() {
    let dir = TempDir::new().unwrap();
    let out = path_str(&dir, "sweep.csv");
    ok(&qtomo(&[
        "sweep",
        "--state",
        "-0.385,-0.042,0.399",
        "--ensemble",
        "30",
        "--epsilon",
        "0.1:0.5:0.1",
        "--reps",
        "1",
        "--seed",
        "11",
        "--out",
        &out,
    ]));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("epsilon,fidelity,std_dev"));
    let r = rows(Path::new(&out));
    assert_eq!(r.len(), 5);
    assert!(r.iter().all(|row| row[2] == 0.0));
    let manifest = fs::read_to_string(format!("{out}.manifest.txt")).unwrap();
    assert!(manifest.contains("seed = 11"), "{manifest}");
}

#[test]
fn manifest_reruns_byte_identically() {
    let dir = TempDir::new().unwrap();
    let first = path_str(&dir, "first.csv");
    ok(&qtomo(&[
        "sweep",
        "--state",
        "1,0,0",
        "--ensemble",
        "30",
        "--epsilon",
        "0.2,0.6",
        "--reps",
        "300",
        "--discard",
        "0.25",
        "--seed",
        "12",
        "--threads",
        "3",
        "--out",
        &first,
    ]));
    let second = path_str(&dir, "second.csv");
    let manifest = format!("{first}.manifest.txt");
    ok(&qtomo(&["sweep", "--config", &manifest, "--threads", "1", "--out", &second]));
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn manifest_reports_degenerate_repetitions() {
    let dir = TempDir::new().unwrap();
    let out = path_str(&dir, "sweep.csv");
    ok(&qtomo(&[
        "sweep",
        "--state",
        "0,0,1",
        "--ensemble",
        "1",
        "--epsilon",
        "0.3",
        "--reps",
        "400",
        "--discard",
        "2",
        "--seed",
        "13",
        "--out",
        &out,
    ]));
    let manifest = fs::read_to_string(format!("{out}.manifest.txt")).unwrap();
    let line = manifest.lines().find(|l| l.contains("degenerate_repetitions")).unwrap();
    let count: usize = line.rsplit('=').next().unwrap().trim().parse().unwrap();
    assert!(count > 0 && count < 400, "{line}");
}

#[test]
fn fully_degenerate_sweep_fails() {
    let dir = TempDir::new().unwrap();
    let out = path_str(&dir, "sweep.csv");
    let res = qtomo(&[
        "sweep",
        "--state",
        "0,0,1",
        "--ensemble",
        "1",
        "--epsilon",
        "0.3",
        "--reps",
        "5",
        "--discard",
        "1000",
        "--out",
        &out,
    ]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).starts_with("qtomo:"));
}

#[test]
fn projective_ensemble_must_divide_by_three() {
    let dir = TempDir::new().unwrap();
    let out = path_str(&dir, "sweep.csv");
    let res = qtomo(&[
        "sweep",
        "--state",
        "0,0,1",
        "--ensemble",
        "31",
        "--epsilon",
        "0.3",
        "--scheme",
        "projective",
        "--out",
        &out,
    ]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("ensemble"));
    assert!(!Path::new(&out).exists());
}

#[test]
fn unphysical_state_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = path_str(&dir, "traj.csv");
    let res = qtomo(&["trajectory", "--state", "1,1,0", "--sigma", "5", "--steps", "10", "--out", &out]);
    assert!(!res.status.success());
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, env: Option<&str>, flag: Option<&str>| {
        let out = path_str(&dir, name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qtomo"));
        cmd.args(["trajectory", "--state", "1,0,0", "--sigma", "4", "--steps", "50", "--out", &out]);
        cmd.env_remove("QTOMO_SEED");
        if let Some(e) = env {
            cmd.env("QTOMO_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        ok(&cmd.output().unwrap());
        fs::read(&out).unwrap()
    };
    let from_env = run("env.csv", Some("77"), None);
    let from_flag = run("flag.csv", None, Some("77"));
    let flag_wins = run("both.csv", Some("1"), Some("77"));
    let other = run("other.csv", Some("78"), None);
    assert_eq!(from_env, from_flag);
    assert_eq!(from_env, flag_wins);
    assert_ne!(from_env, other);
}
