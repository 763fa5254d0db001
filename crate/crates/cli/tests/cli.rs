use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn symopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symopt")).args(args).output().expect("run symopt")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn seven_state_example_solves() {
    let dir = TempDir::new().unwrap();
    let o = symopt(&["solve", s(&data("seven_state.txt")), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let ctl = fs::read_to_string(dir.path().join("solution.controller.txt")).unwrap();
    assert!(ctl.lines().any(|l| l == "5 0"), "{ctl}");
    let vals = fs::read_to_string(dir.path().join("solution.values.txt")).unwrap();
    assert!(vals.lines().any(|l| l == "6 0.0"), "{vals}");
}

#[test]
fn negative_self_loop_exits_two() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("loop.txt");
    fs::write(&p, "states 1 inputs 1\n0 0 0 : -1\nterminal 0 0\n").unwrap();
    let o = symopt(&["solve", s(&p), "--out", s(&dir.path().join("out"))]);
    assert_eq!(code(&o), 2);
    let m: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["problems"][0]["converged"], false);
}

#[test]
fn malformed_config_names_line_and_key() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.cfg");
    let text = fs::read_to_string(data("double_integrator.cfg")).unwrap().replace("a.1 = 0, 0", "a.1 = 0");
    fs::write(&p, text).unwrap();
    let o = symopt(&["solve", s(&p), "--out", s(dir.path())]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`a.1`") && err.contains("line 10"), "{err}");
}

#[test]
fn artifacts_are_deterministic_and_manifest_hashes_the_input() {
    let dir = TempDir::new().unwrap();
    let cfg = data("double_integrator.cfg");
    let runs: Vec<PathBuf> = [("1", "all"), ("1", "none"), ("2", "none"), ("3", "all")]
        .iter()
        .enumerate()
        .map(|(i, (t, c))| {
            let out = dir.path().join(format!("run{i}"));
            let o = symopt(&["solve", s(&cfg), "--threads", t, "--cache", c, "--out", s(&out)]);
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
            out
        })
        .collect();
    let read = |r: &PathBuf, f: &str| fs::read(r.join(f)).unwrap();
    for f in ["solution.values.txt", "solution.controller.txt", "solution.bin"] {
        assert!(read(&runs[0], f) == read(&runs[1], f), "{f} differs between single-thread runs");
    }
    // Across thread counts only the values are fixed; tied inputs may differ.
    for r in &runs[2..] {
        assert!(read(&runs[0], "solution.values.txt") == read(r, "solution.values.txt"), "values differ");
    }
    let m: serde_json::Value = serde_json::from_slice(&fs::read(runs[0].join("manifest.json")).unwrap()).unwrap();
    let want = hex::encode(Sha256::digest(fs::read(&cfg).unwrap()));
    assert_eq!(m["config_sha256"], want.as_str());
    assert_eq!(m["kind"], "linear");
    assert_eq!(m["grid"]["cells"], serde_json::json!([60, 60]));
}

#[test]
fn verify_passes_good_input_and_fails_corrupt_input() {
    let o = symopt(&["verify", s(&data("seven_state.txt")), "--random", "20", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(!String::from_utf8_lossy(&o.stdout).contains("FAIL"));

    let dir = TempDir::new().unwrap();
    let p = dir.path().join("corrupt.txt");
    let text = fs::read_to_string(data("seven_state.txt")).unwrap().replace("4 1 2 : -4\n", "");
    fs::write(&p, text).unwrap();
    let o = symopt(&["verify", s(&p)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn verify_skips_oracle_above_threshold() {
    let o = symopt(&["verify", s(&data("double_integrator.cfg")), "--oracle-max-states", "100", "--samples", "200"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("SKIP oracle-equivalence"), "{out}");
}

#[test]
fn convert_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    assert_eq!(code(&symopt(&["solve", s(&data("seven_state.txt")), "--out", s(out)])), 0);
    let (v, c, b) = (out.join("v.txt"), out.join("c.txt"), out.join("b.bin"));
    let o = symopt(&["convert", "--to", "text", "--bin", s(&out.join("solution.bin")), "--values", s(&v), "--controller", s(&c)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&v).unwrap(), fs::read(out.join("solution.values.txt")).unwrap());
    assert_eq!(fs::read(&c).unwrap(), fs::read(out.join("solution.controller.txt")).unwrap());
    let o = symopt(&["convert", "--to", "binary", "--bin", s(&b), "--values", s(&v), "--controller", s(&c)]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(&b).unwrap(), fs::read(out.join("solution.bin")).unwrap());
}

#[test]
fn build_matches_lazy_solve() {
    let dir = TempDir::new().unwrap();
    let cfg = data("double_integrator.cfg");
    assert_eq!(code(&symopt(&["build", s(&cfg), "--out", s(&dir.path().join("b"))])), 0);
    let problem = dir.path().join("b/problem.txt");
    assert_eq!(code(&symopt(&["solve", s(&problem), "--out", s(&dir.path().join("m"))])), 0);
    assert_eq!(code(&symopt(&["solve", s(&cfg), "--out", s(&dir.path().join("l"))])), 0);
    let body = |p: PathBuf| fs::read_to_string(p).unwrap().lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(body(dir.path().join("m/solution.values.txt")), body(dir.path().join("l/solution.values.txt")));
}

#[test]
fn simulate_rejects_foreign_artifacts_and_bad_starts() {
    let dir = TempDir::new().unwrap();
    let cfg = data("mission_coarse.cfg");
    let out = dir.path().join("m");
    assert_eq!(code(&symopt(&["solve", s(&cfg), "--out", s(&out)])), 0);
    let (drop, land) = (out.join("drop.bin"), out.join("land.bin"));
    let traj = dir.path().join("t.csv");

    let other = dir.path().join("other.cfg");
    fs::write(&other, fs::read_to_string(&cfg).unwrap().replace("12, 8, 12, 3", "12, 8, 12, 4")).unwrap();
    let o = symopt(&["simulate", s(&other), s(&drop), s(&land), "--out", s(&traj)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid hash mismatch"));

    let o = symopt(&["simulate", s(&cfg), s(&drop), s(&land), "--x0", "5000,100,0,53", "--out", s(&traj)]);
    assert_eq!(code(&o), 1);
    let o = symopt(&["simulate", s(&cfg), s(&drop), s(&land), "--x0", "1,2", "--out", s(&traj)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn budgeted_cache_needs_a_budget() {
    let o = symopt(&["solve", s(&data("seven_state.txt")), "--cache", "budgeted"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--mem-budget"));
}
