use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn wml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wml"))
        .args(args)
        .env("WML_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn matrix_file(dir: &Path, name: &str, re: &[[f64; 2]; 2], im: &[[f64; 2]; 2]) -> PathBuf {
    let p = dir.join(name);
    let j = serde_json::json!({ "dim": 2, "re": re, "im": im });
    fs::write(&p, j.to_string()).unwrap();
    p
}

const ZERO: [[f64; 2]; 2] = [[0.0, 0.0], [0.0, 0.0]];

fn decay_inputs(dir: &Path) -> (PathBuf, PathBuf) {
    let l = matrix_file(dir, "l.json", &[[0.0, 1.0], [0.0, 0.0]], &ZERO);
    let rho = matrix_file(dir, "rho.json", &[[0.0, 0.0], [0.0, 1.0]], &ZERO);
    (l, rho)
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn entry(state: &Value, part: &str, i: usize, j: usize) -> f64 {
    state[part][i][j].as_f64().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_default_passes_with_all_sections() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v.json");
    let r = wml(&["verify", "--dim", "2", "--trials", "20", "--out", s(&out)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v = read_json(&out);
    assert!(v["pass"].as_bool().unwrap());
    assert!(v["sections"].as_array().unwrap().len() >= 5);
}

#[test]
fn verify_rejects_large_dimension() {
    assert_eq!(code(&wml(&["verify", "--dim", "99"])), 2);
}

#[test]
fn verify_impossible_tolerance_fails_but_writes_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v.json");
    let r = wml(&["verify", "--trials", "5", "--tol", "1e-30", "--out", s(&out)]);
    assert_eq!(code(&r), 1);
    assert!(!read_json(&out)["pass"].as_bool().unwrap());
}

#[test]
fn sweep_needs_three_step_counts() {
    assert_eq!(code(&wml(&["sweep", "--steps-list", "10,100", "--trials", "1"])), 2);
}

#[test]
fn malformed_json_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let (_, rho) = decay_inputs(dir.path());
    assert_eq!(code(&wml(&["simulate", "--lindblad", s(&bad), "--rho", s(&rho)])), 3);
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let (l, _) = decay_inputs(dir.path());
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&wml(&["simulate", "--lindblad", s(&l), "--rho", s(&missing)])), 3);
}

#[test]
fn non_unit_norm_requires_auto_rescale() {
    let dir = TempDir::new().unwrap();
    let l = matrix_file(dir.path(), "big.json", &[[0.0, 2.0], [0.0, 0.0]], &ZERO);
    let (_, rho) = decay_inputs(dir.path());
    let args = ["simulate", "--lindblad", s(&l), "--rho", s(&rho), "--steps", "400"];
    assert_eq!(code(&wml(&args)), 2);

    let out = dir.path().join("r.json");
    let mut with = args.to_vec();
    with.extend(["--auto-rescale", "--time", "0.25", "--compare-exact", "--out", s(&out)]);
    let r = wml(&with);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v = read_json(&out);
    // ‖L‖₂² = 4 turns t = 0.25 into a unit run
    assert!((v["time"].as_f64().unwrap() - 1.0).abs() < 1e-15);
    let excited = entry(&v["final_state"], "re", 1, 1);
    assert!((excited - (-1.0f64).exp()).abs() < 5e-3);
}

#[test]
fn amplitude_damping_matches_exact() {
    let dir = TempDir::new().unwrap();
    let (l, rho) = decay_inputs(dir.path());
    let out = dir.path().join("sim.json");
    let r = wml(&[
        "simulate", "--lindblad", s(&l), "--rho", s(&rho), "--time", "1", "--steps", "1000",
        "--compare-exact", "--out", s(&out),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let stdout = String::from_utf8(r.stdout).unwrap();
    let reported: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("trace_distance_to_exact "))
        .expect("distance line")
        .parse()
        .unwrap();
    assert!(reported <= 5e-3);
    let v = read_json(&out);
    assert_eq!(v["n"].as_u64(), Some(1000));
    assert_eq!(v["distance_to_exact"].as_f64(), Some(reported));
    let p1 = entry(&v["final_state"], "re", 1, 1);
    assert!((p1 - (-1.0f64).exp()).abs() < 5e-3);
}

#[test]
fn zero_time_returns_input() {
    let dir = TempDir::new().unwrap();
    let (l, _) = decay_inputs(dir.path());
    let rho = matrix_file(dir.path(), "plus.json", &[[0.5, 0.5], [0.5, 0.5]], &ZERO);
    let r = wml(&["simulate", "--lindblad", s(&l), "--rho", s(&rho), "--time", "0", "--steps", "7"]);
    assert_eq!(code(&r), 0);
    let v: Value = serde_json::from_slice(&r.stdout).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(entry(&v["final_state"], "re", i, j), 0.5);
            assert_eq!(entry(&v["final_state"], "im", i, j), 0.0);
        }
    }
}

#[test]
fn algorithm_two_needs_hamiltonian() {
    let dir = TempDir::new().unwrap();
    let (l, rho) = decay_inputs(dir.path());
    assert_eq!(code(&wml(&["simulate", "--lindblad", s(&l), "--rho", s(&rho), "--algorithm", "2"])), 2);
    let h = matrix_file(dir.path(), "z.json", &[[1.0, 0.0], [0.0, -1.0]], &ZERO);
    let r = wml(&["simulate", "--lindblad", s(&l), "--rho", s(&rho), "--hamiltonian", s(&h)]);
    assert_eq!(code(&r), 2);
}

#[test]
fn algorithm_two_identity_jump_is_unitary() {
    // L = I/√2 contributes nothing; only H = Z acts
    let dir = TempDir::new().unwrap();
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let l = matrix_file(dir.path(), "id.json", &[[w, 0.0], [0.0, w]], &ZERO);
    let h = matrix_file(dir.path(), "z.json", &[[1.0, 0.0], [0.0, -1.0]], &ZERO);
    let rho = matrix_file(dir.path(), "plus.json", &[[0.5, 0.5], [0.5, 0.5]], &ZERO);
    let out = dir.path().join("u.json");
    let r = wml(&[
        "simulate", "--algorithm", "2", "--lindblad", s(&l), "--hamiltonian", s(&h), "--rho", s(&rho),
        "--time", "0.5", "--steps", "400", "--compare-exact", "--out", s(&out),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v = read_json(&out);
    assert!(v["distance_to_exact"].as_f64().unwrap() < 2e-2);
    // coherence rotates as e^{-2it}/2
    let st = &v["final_state"];
    let c = (entry(st, "re", 0, 1), entry(st, "im", 0, 1));
    assert!((c.0 - 0.5 * 1f64.cos()).abs() < 2e-2);
    assert!((c.1 + 0.5 * 1f64.sin()).abs() < 2e-2);
}

#[test]
fn sweep_is_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let r = wml(&["sweep", "--steps-list", "10,30,100", "--trials", "2", "--seed", "5", "--out", s(&out)]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
        let fit = out.with_extension("fit.json");
        (fs::read(&out).unwrap(), fs::read(fit).unwrap())
    };
    let a = run("a.csv");
    let b = run("b.csv");
    assert_eq!(a, b);
    let csv = String::from_utf8(a.0).unwrap();
    assert_eq!(csv.lines().next(), Some("n,delta,trial,distance"));
    assert_eq!(csv.lines().count(), 1 + 3 * 2);
}

#[test]
fn sweep_seed_changes_output() {
    let run = |seed: &str| {
        let r = wml(&["sweep", "--steps-list", "10,20,40", "--trials", "1", "--seed", seed]);
        r.stdout
    };
    assert_ne!(run("1"), run("2"));
}

#[test]
fn fixed_ratio_mode_reports_flatness() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fr.json");
    let r = wml(&[
        "sweep", "--fixed-ratio", "0.01", "--times", "0.5,1,2", "--trials", "2", "--seed", "3", "--out", s(&out),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v = read_json(&out);
    assert!(v["pass"].as_bool().unwrap());
    assert!(v["max_over_min"].as_f64().unwrap() <= 4.0);
}

#[test]
fn bad_thread_count_is_rejected() {
    let r = Command::new(env!("CARGO_BIN_EXE_wml"))
        .args(["verify", "--trials", "1"])
        .env("WML_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&r), 2);
}
