use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use discordium::states::{bell_state, random_cq_sample, random_state, BipartiteState};
use discordium::zeroing::counterexample_matrix;
use discordium::CMatrix;
use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_discordium"));
    c.env_remove("DISCORDIUM_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let v =
        serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

fn write_matrix(dir: &Path, name: &str, dims: &[usize], m: &CMatrix) -> PathBuf {
    let entries: Vec<[f64; 2]> = m.as_slice().iter().map(|z| [z.re, z.im]).collect();
    let path = dir.join(name);
    std::fs::write(&path, json!({"dims": dims, "matrix": entries}).to_string()).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn num(v: &Value, key: &str) -> f64 {
    v["results"][key]
        .as_f64()
        .unwrap_or_else(|| panic!("missing {key} in {v}"))
}

#[test]
fn entropy_of_fixtures() {
    let dir = TempDir::new().unwrap();
    let b = write_matrix(dir.path(), "b.json", &[2, 2], &counterexample_matrix());
    let (code, v) = run_json(&["entropy", p(&b)]);
    assert_eq!(code, 0);
    assert!((num(&v, "entropy_bits") - 1.7555).abs() < 5e-4);
    assert_eq!(v["results"]["spectrum"].as_array().unwrap().len(), 4);

    let mixed = write_matrix(dir.path(), "m.json", &[4], &CMatrix::identity(4).scale(0.25));
    let (_, v) = run_json(&["entropy", p(&mixed)]);
    assert!((num(&v, "entropy_bits") - 2.0).abs() < 1e-12);
}

#[test]
fn nested_rows_are_accepted() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("rows.json");
    std::fs::write(&path, r#"{"dims":[2],"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#).unwrap();
    let (code, v) = run_json(&["entropy", p(&path)]);
    assert_eq!(code, 0);
    assert!((num(&v, "entropy_bits") - 1.0).abs() < 1e-12);
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dims\": [2], \"matrix\": [[1, 0]").unwrap();
    let out = run(&["entropy", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));

    let heavy = write_matrix(dir.path(), "t.json", &[2], &CMatrix::identity(2));
    let out = run(&["entropy", p(&heavy)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("validation error: matrix"));

    let wrong_dims = write_matrix(dir.path(), "d.json", &[3], &CMatrix::identity(2).scale(0.5));
    let out = run(&["entropy", p(&wrong_dims)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("validation error: dims"));

    let single = write_matrix(dir.path(), "s.json", &[4], &CMatrix::identity(4).scale(0.25));
    assert_eq!(run(&["discord", p(&single)]).status.code(), Some(2));
    assert_eq!(run(&["entropy", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn raw_mode_accepts_operators() {
    let dir = TempDir::new().unwrap();
    let effect = write_matrix(dir.path(), "e.json", &[2], &CMatrix::diag_real(&[1.0, 0.0]));
    let heavy = write_matrix(dir.path(), "h.json", &[2], &CMatrix::identity(2));
    assert_eq!(run(&["entropy", p(&heavy)]).status.code(), Some(2));
    let (code, v) = run_json(&["entropy", "--raw", p(&heavy)]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["spectrum"], json!([1.0, 1.0]));
    let (code, _) = run_json(&["entropy", "--raw", p(&effect)]);
    assert_eq!(code, 0);
}

#[test]
fn discord_fixtures_and_determinism() {
    let dir = TempDir::new().unwrap();
    let bell = write_matrix(dir.path(), "bell.json", &[2, 2], bell_state::<f64>().matrix());
    let (code, v) = run_json(&["discord", p(&bell), "--restarts", "4"]);
    assert_eq!(code, 0);
    assert!((num(&v, "value_bits") - 1.0).abs() < 2e-3);
    assert_eq!(v["results"]["enlarged"], json!(true));
    assert_eq!(v["results"]["best_basis"].as_array().unwrap().len(), 4);

    let (_, v) = run_json(&["discord", p(&bell), "--restarts", "4", "--enlarge=false"]);
    assert_eq!(v["results"]["enlarged"], json!(false));

    let cq = dir.path().join("cq.json");
    assert!(run(&[
        "random",
        "--kind",
        "cq",
        "--da",
        "3",
        "--db",
        "2",
        "--seed",
        "3",
        "-o",
        p(&cq)
    ])
    .status
    .success());
    let (_, v) = run_json(&["discord", p(&cq), "--restarts", "4"]);
    assert!(num(&v, "value_bits") <= 1e-6);

    let a = run(&["discord", p(&cq), "--restarts", "3", "--seed", "11", "--json"]);
    let b = run(&["discord", p(&cq), "--restarts", "3", "--seed", "11", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], json!(11));
    assert!(v["tolerances"]["zero_discord"].is_number());
    assert_eq!(v["inputs"]["state"].as_str().unwrap().len(), 64);
}

#[test]
fn seed_comes_from_environment() {
    let dir = TempDir::new().unwrap();
    let bell = write_matrix(dir.path(), "bell.json", &[2, 2], bell_state::<f64>().matrix());
    let out = bin()
        .args(["discord", p(&bell), "--restarts", "1", "--json"])
        .env("DISCORDIUM_SEED", "42")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], json!(42));
}

#[test]
fn certify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let cq = dir.path().join("cq.json");
    assert!(run(&[
        "random",
        "--kind",
        "cq",
        "--da",
        "3",
        "--db",
        "2",
        "--seed",
        "5",
        "-o",
        p(&cq)
    ])
    .status
    .success());
    let (code, v) = run_json(&["certify", p(&cq), "--restarts", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["classical"], json!(true));
    assert_eq!(v["results"]["partition"], json!([[0], [1], [2]]));

    let bell = write_matrix(dir.path(), "bell.json", &[2, 2], bell_state::<f64>().matrix());
    let (code, v) = run_json(&["certify", p(&bell), "--restarts", "4"]);
    assert_eq!(code, 1);
    assert!((v["results"]["witness"]["discord_bits"].as_f64().unwrap() - 1.0).abs() < 2e-3);

    let prod = BipartiteState::product(&random_state(2, 2, 1).unwrap(), &random_state(2, 2, 2).unwrap());
    let prod = write_matrix(dir.path(), "prod.json", &[2, 2], prod.matrix());
    let (code, v) = run_json(&["certify", p(&prod), "--restarts", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["partition"], json!([[0, 1]]));
}

#[test]
fn petz_verify() {
    let dir = TempDir::new().unwrap();
    let sample = random_cq_sample::<f64>(3, 2, 9).unwrap();
    let state = write_matrix(dir.path(), "cq.json", &[3, 2], sample.state.matrix());
    let basis = write_matrix(dir.path(), "u.json", &[3], &sample.basis);
    let (code, v) = run_json(&["petz-verify", p(&state), "--basis", p(&basis)]);
    assert_eq!(code, 0);
    assert!(num(&v, "residual") <= 1e-9);
    assert!(num(&v, "closed_form_vs_petz") <= 1e-9);
    assert!(v["inputs"]["basis"].is_string());

    let bell = write_matrix(dir.path(), "bell.json", &[2, 2], bell_state::<f64>().matrix());
    let id2 = write_matrix(dir.path(), "id2.json", &[2], &CMatrix::identity(2));
    let (code, v) = run_json(&["petz-verify", p(&bell), "--basis", p(&id2)]);
    assert_eq!(code, 0);
    assert!(num(&v, "residual") > 0.1);

    let out = run(&["petz-verify", p(&bell), "--basis", p(&basis)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
}

#[test]
fn zeroing_command_report() {
    let (code, v) = run_json(&["zeroing"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["passed"], json!(true));
    let reports = v["results"]["reports"].as_array().unwrap();
    assert!((reports[0]["original_entropy"].as_f64().unwrap() - 1.7555).abs() < 5e-4);
    assert!((reports[0]["modified_entropy"].as_f64().unwrap() - 1.7546).abs() < 5e-4);
    assert!(reports[1]["entropy_delta"].as_f64().unwrap() < 0.0);
    let a = run(&["zeroing", "--json"]);
    let b = run(&["zeroing", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let plain = run(&["zeroing"]);
    assert!(plain.status.success());
    assert!(String::from_utf8_lossy(&plain.stdout).contains("passed: true"));
}

#[test]
fn random_files() {
    let dir = TempDir::new().unwrap();
    let f1 = dir.path().join("a.json");
    let f2 = dir.path().join("b.json");
    for f in [&f1, &f2] {
        assert!(run(&["random", "--kind", "cq", "--seed", "7", "-o", p(f)])
            .status
            .success());
    }
    assert_eq!(std::fs::read(&f1).unwrap(), std::fs::read(&f2).unwrap());
    let (code, _) = run_json(&["certify", p(&f1), "--restarts", "4"]);
    assert_eq!(code, 0);

    let pure = dir.path().join("pure.json");
    assert!(
        run(&["random", "--kind", "haar", "--rank", "1", "--seed", "2", "-o", p(&pure)])
            .status
            .success()
    );
    let (_, v) = run_json(&["entropy", p(&pure)]);
    assert!(num(&v, "entropy_bits").abs() < 1e-9);

    let out = run(&["random", "--kind", "haar", "--rank", "9"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["random", "--seed", "4"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dims"], json!([2, 2]));
    assert_eq!(v["matrix"].as_array().unwrap().len(), 16);
}
