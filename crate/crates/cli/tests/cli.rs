//! Runs the `leray` binary end to end.

use leray::spectral::fields::random_band_limited;
use leray::spectral::io::{load_field, save_field};
use leray::{GridSpec, SpectralLeray};
use serde_json::Value;
use std::process::{Command, Output};

const SMALL_GRID: &str = "8,32,8:32,64,64";

fn leray(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leray")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 output")
}

#[test]
fn norm_sweep_csv() {
    let o = leray(&["norm", "--beta", "0,0.3,0.6", "--grid", SMALL_GRID]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let headers = rows.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["beta", "exact", "crude", "power_iter", "extremal", "grid_id", "residual"]);
    let exact: Vec<String> = rows.records().map(|r| r.unwrap()[1].to_string()).collect();
    assert_eq!(exact, ["1", "1.02385782056", "1.11803398875"]);
}

#[test]
fn norm_output_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["norm", "--beta", "0.2,0.7", "--grid", SMALL_GRID, "--seed", "42"];
    let a = leray(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_leray")).args(args).env("LERAY_THREADS", "1").output().unwrap();
    let c = Command::new(env!("CARGO_BIN_EXE_leray")).args(args).env("LERAY_THREADS", "3").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn norm_json_has_the_csv_fields() {
    let o = leray(&["norm", "--beta", "0", "--json", "--grid", SMALL_GRID]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["beta", "exact", "crude", "power_iter", "extremal", "grid_id", "residual"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["exact"], 1.0);
    assert_eq!(v["crude"], 2.0);
}

#[test]
fn invalid_input_exits_with_usage_code() {
    assert_eq!(leray(&["norm", "--beta", "1.0"]).status.code(), Some(2));
    assert_eq!(leray(&["norm", "--grid", "bad"]).status.code(), Some(2));
    assert_eq!(leray(&["verify", "--only", "bogus"]).status.code(), Some(2));
    assert_eq!(leray(&["no-such-command"]).status.code(), Some(2));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_leray")).args(["norm", "--beta", "0"]).env("LERAY_THREADS", "zero").output().unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn verify_kernel_l2_reports_the_closed_form() {
    let o = leray(&["verify", "--only", "kernel-l2", "--beta", "0", "--eps", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("PASS kernel-l2"), "{text}");
    assert!(text.contains("2.53302959106e-2"), "{text}");
}

#[test]
fn verify_names_the_failing_check_when_a_defect_is_injected() {
    let o = leray(&["verify", "--only", "idempotence,hs-norm", "--grid", SMALL_GRID, "--beta", "0.5", "--inject", "m1-sign"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL idempotence"));
    assert!(stdout(&o).contains("PASS hs-norm"));
    assert!(stderr(&o).contains("failed checks: idempotence"), "{}", stderr(&o));
}

#[test]
fn verify_json_output() {
    let o = leray(&["verify", "--only", "invariance,dual-geometry", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert_eq!(checks[0]["check"], "invariance");
    assert!(checks[1]["metrics"].as_array().unwrap().iter().all(|m| m["passed"] == true));
}

#[test]
fn dual_worked_examples() {
    let o = leray(&["dual", "--surface", "sbeta:0.5", "--matrix", "M2", "--point", "1,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("w1 = 1.5 + 0i"), "{text}");
    assert!(text.contains("w2 = 0 - 1.5i"), "{text}");
    assert!(text.contains("eta = -0.5 + 0i"), "{text}");

    let o = leray(&["dual", "--surface", "sbeta:0", "--matrix", "M2", "--point", "0,0", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["eta"]["value"], serde_json::json!([0.0, 0.0]));

    let o = leray(&["dual", "--surface", "sphere", "--matrix", "m2", "--point", "0.3,0.2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn dual_regularity_failure_reports_the_determinant() {
    let o = leray(&["dual", "--surface", "sbeta:0.5", "--matrix", "M1", "--point", "0,0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("determinant"), "{}", stderr(&o));
}

#[test]
fn dual_rejects_a_singular_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("singular.json");
    let zero = r#"{"c1":[0,0],"a1":[0,0],"a2":[0,0],"b1":[0,0],"m11":[0,0],"m12":[0,0],"b2":[0,0],"m21":[0,0],"m22":[0,0]}"#;
    std::fs::write(&path, zero).unwrap();
    assert_eq!(leray(&["dual", "--matrix", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(leray(&["dual", "--matrix", "M9"]).status.code(), Some(2));
    assert_eq!(leray(&["dual", "--surface", "sphere", "--point", "2,0"]).status.code(), Some(2));
}

#[test]
fn dual_accepts_a_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m2.json");
    std::fs::write(&path, leray::ProjMatrix::m2().to_json().unwrap()).unwrap();
    let by_file = leray(&["dual", "--surface", "sbeta:0.5", "--matrix", path.to_str().unwrap(), "--point", "1,0"]);
    let by_name = leray(&["dual", "--surface", "sbeta:0.5", "--matrix", "M2", "--point", "1,0"]);
    assert_eq!(by_file.status.code(), Some(0), "{}", stderr(&by_file));
    let strip = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with("matrix")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&by_file), strip(&by_name));
}

#[test]
fn kernel_norm_table() {
    let o = leray(&["kernel-norm", "--beta", "0", "--eps", "1,2", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!(r["relative_error"].as_f64().unwrap().abs() < 5e-3);
    }
    assert_eq!(leray(&["kernel-norm", "--eps", "0"]).status.code(), Some(2));
    assert_eq!(leray(&["kernel-norm", "--nodes", "12,16,16"]).status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, format!(r#"{{"beta": [0.2], "grid": "{SMALL_GRID}"}}"#)).unwrap();
    let cfg = path.to_str().unwrap();
    let from_file = stdout(&leray(&["--config", cfg, "norm"]));
    assert!(from_file.lines().nth(1).unwrap().starts_with("0.2,"), "{from_file}");
    let flag_wins = stdout(&leray(&["--config", cfg, "norm", "--beta", "0.4"]));
    assert!(flag_wins.lines().nth(1).unwrap().starts_with("0.4,"), "{flag_wins}");
    std::fs::write(&path, r#"{"betta": 0.2}"#).unwrap();
    assert_eq!(leray(&["--config", cfg, "norm"]).status.code(), Some(2));
}

#[test]
fn apply_roundtrips_field_files() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("f.lerf"), dir.path().join("g.lerf"));
    let grid = GridSpec::new([8.0, 32.0, 8.0], [32, 64, 64]).unwrap();
    let f = random_band_limited(grid, 3, 0.9);
    save_field(&input, &f).unwrap();
    let op = SpectralLeray::new(0.5, grid).unwrap();
    let (i, o) = (input.to_str().unwrap(), output.to_str().unwrap());

    let run = leray(&["apply", "--input", i, "--output", o, "--beta", "0.5"]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    assert_eq!(load_field(&output).unwrap(), op.apply_boundary(&f).unwrap());

    let run = leray(&["apply", "--input", i, "--output", o, "--beta", "0.5", "--eps", "1", "--json"]);
    assert_eq!(run.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&run)).unwrap();
    assert_eq!(v["operator"], "shell");
    assert_eq!(load_field(&output).unwrap(), op.apply_shell(&f, 1.0).unwrap());

    let run = leray(&["apply", "--input", i, "--output", o, "--beta", "0.5", "--dual"]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(load_field(&output).unwrap(), op.apply_dual(&f).unwrap());

    assert_eq!(leray(&["apply", "--input", i, "--output", o, "--beta", "0.5", "--eps", "0"]).status.code(), Some(2));
    let missing = dir.path().join("missing.lerf");
    assert_eq!(leray(&["apply", "--input", missing.to_str().unwrap(), "--output", o, "--beta", "0.5"]).status.code(), Some(2));
}

#[test]
fn extremal_bump_is_configurable() {
    let o = leray(&["norm", "--beta", "0.5", "--grid", SMALL_GRID, "--bump-center", "0.1,-0.3", "--bump-width", "0.1,0.05", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["extremal"].as_f64().unwrap() / v["exact"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(leray(&["norm", "--beta", "0", "--bump-center", "0,-0.1", "--bump-width", "0.1,0.1"]).status.code(), Some(2));
    assert_eq!(leray(&["norm", "--beta", "0", "--bump-center", "0"]).status.code(), Some(2));
}
