mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use riesz::cli::io::{read_matrix, to_json_string, to_matrix_market_string};
use riesz::cli::{cmd_certify, cmd_decompose, cmd_powerbound, cmd_spectrum, EXIT_FINDING, EXIT_INPUT, EXIT_NUMERICAL};
use riesz::decompose::Settings;
use riesz::{c64, Matrix};
use serde_json::Value;

use common::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_riesz"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn riesz")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn write_matrix(dir: &Path, name: &str, m: &Matrix) -> PathBuf {
    let path = dir.join(name);
    let text = if name.ends_with(".mtx") {
        to_matrix_market_string(m)
    } else {
        to_json_string(m)
    };
    std::fs::write(&path, text).unwrap();
    path
}

fn entries(v: &Value) -> Vec<(f64, f64)> {
    v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect()
}

#[test]
fn spectrum_of_involution() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_matrix(dir.path(), "a.json", &involution());
    let out = run(&["spectrum", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let eigs = v["results"]["spectrum"]["eigenvalues"].as_array().unwrap();
    let mut re: Vec<f64> = eigs.iter().map(|z| z[0].as_f64().unwrap()).collect();
    re.sort_by(f64::total_cmp);
    assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
    assert_eq!(v["results"]["unimodularity"]["pass"], Value::Bool(true));
}

#[test]
fn spectrum_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_matrix(dir.path(), "i.mtx", &Matrix::identity(4));
    let v = stdout_json(&run(&["spectrum", path.to_str().unwrap()]));
    let clusters = v["results"]["spectrum"]["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 1);
    assert_eq!(clusters[0]["multiplicity"], 4);
    assert_eq!(clusters[0]["center"][0].as_f64(), Some(1.0));
    assert_eq!(v["parameters"]["input_format"], "matrix-market-array");
}

#[test]
fn reports_equal_library_calls() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(21);
    let path = write_matrix(dir.path(), "r.json", &random_matrix(&mut r, 4));
    let p = path.to_str().unwrap();
    let input = read_matrix(&path).unwrap();
    let settings = Settings::default();
    let cases = [
        (vec!["spectrum", p], cmd_spectrum(&input, None, 1e-8).unwrap()),
        (vec!["decompose", p], cmd_decompose(&input, &settings).unwrap()),
        (vec!["certify", p], cmd_certify(&input, &settings).unwrap()),
        (vec!["powerbound", p], cmd_powerbound(&input, 256, 2.0).unwrap()),
    ];
    for (args, report) in cases {
        let out = run(&args);
        assert_eq!(String::from_utf8(out.stdout).unwrap(), report.to_json(), "{args:?}");
    }
}

#[test]
fn certify_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_matrix(dir.path(), "a.json", &involution());
    let out = run(&["certify", a.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["verdict"], "decomposable");

    let j = write_matrix(dir.path(), "j.mtx", &jordan());
    let out = run(&["certify", j.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_FINDING));
    assert_eq!(stdout_json(&out)["verdict"], "not-decomposable");
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    let failed = err["failure"]["failed"].as_array().unwrap();
    assert!(failed.iter().any(|f| f == "reconstruction"), "{err}");
}

#[test]
fn project_reproduces_involution_projection() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_matrix(dir.path(), "a.json", &involution());
    let out = run(&["project", a.to_str().unwrap(), "--center", "1", "--radius", "0.5", "--nodes", "64"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let got = entries(&v["results"]["projection"]["matrix"]);
    let want = [3.0, -1.0, 6.0, -2.0];
    for (g, w) in got.iter().zip(want) {
        assert!((g.0 - w).abs() < 1e-8 && g.1.abs() < 1e-8);
    }
    assert_eq!(v["results"]["rank"], 1);
    assert_eq!(v["results"]["kr"]["pass"], Value::Bool(true));

    let out = run(&["project", a.to_str().unwrap(), "--center", "-1", "--radius", "0.5"]);
    let got = entries(&stdout_json(&out)["results"]["projection"]["matrix"]);
    assert!((got[0].0 + 2.0).abs() < 1e-8);
}

#[test]
fn generated_operator_round_trips_through_certify() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("g.json");
    let o = out_path.to_str().unwrap();
    let args = ["generate", "--kind", "power-bounded", "--n", "2", "--values", "1,-1", "--seed", "42", "--out", o];
    let first = run(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let matrix_bytes = std::fs::read(&out_path).unwrap();
    let truth_bytes = std::fs::read(dir.path().join("g.truth.json")).unwrap();

    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(matrix_bytes, std::fs::read(&out_path).unwrap());
    assert_eq!(truth_bytes, std::fs::read(dir.path().join("g.truth.json")).unwrap());

    let cert = run(&["certify", o]);
    assert!(cert.status.success());
    assert_eq!(stdout_json(&cert)["verdict"], "decomposable");

    let truth: Value = serde_json::from_slice(&truth_bytes).unwrap();
    assert_eq!(truth["truth"]["projections"].as_array().unwrap().len(), 2);
}

#[test]
fn generate_defective_writes_jordan_block() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("j.mtx");
    let out = run(&["generate", "--kind", "defective", "--n", "2", "--values", "1", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(read_matrix(&out_path).unwrap().matrix, jordan());
    let pb = run(&["powerbound", out_path.to_str().unwrap()]);
    assert_eq!(pb.status.code(), Some(EXIT_FINDING));
    assert_eq!(stdout_json(&pb)["verdict"], "not-bounded");
}

#[test]
fn selftest_passes_and_detects_unreachable_tolerance() {
    let out = run(&["selftest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["verdict"], "pass");

    let out = run(&["selftest", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(EXIT_FINDING));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    let failed = err["failure"]["failed"].as_array().unwrap();
    assert!(failed.iter().any(|f| f.as_str().unwrap().starts_with("involution.projection")));
}

#[test]
fn selftest_reports_corrupted_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("golden");
    for entry in std::fs::read_dir(&golden).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
    }
    let d = dir.path().to_str().unwrap();
    assert!(run(&["selftest", "--golden-dir", d]).status.success());

    std::fs::write(dir.path().join("involution.json"), "{\"rows\": 2, \"cols\": 2, \"entries\": [[5, 0]").unwrap();
    let out = run(&["selftest", "--golden-dir", d]);
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "input");
    assert!(err["error"]["line"].as_u64().is_some());
}

#[test]
fn input_and_numerical_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"rows\": 1, \"cols\": 2, \"entries\": [[1, 0], [2]]}").unwrap();
    let out = run(&["spectrum", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["field"], "entries[1]");

    let missing = run(&["spectrum", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(EXIT_INPUT));

    let singular = write_matrix(dir.path(), "s.json", &Matrix::diag(&[c64(1.0, 0.0), c64(0.0, 0.0)]));
    let out = run(&["decompose", singular.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_NUMERICAL));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "numerical");

    let rect = write_matrix(dir.path(), "r.json", &Matrix::zeros(2, 3));
    assert_eq!(run(&["spectrum", rect.to_str().unwrap()]).status.code(), Some(EXIT_NUMERICAL));

    assert_eq!(run(&["spectrum"]).status.code(), Some(2));
    let out = run(&["generate", "--kind", "power-bounded", "--n", "3", "--values", "1,1"]);
    assert_eq!(out.status.code(), Some(EXIT_NUMERICAL));
}
