use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const GAUSS_U1: &str = r#"{"n":1,"u1":{"terms":[{"coeff":1.0,"prim":{"kind":"gaussian","a":0.5}}]}}"#;
const GAUSS_BOTH: &str = r#"{"n":2,"u0":{"terms":[{"coeff":0.7,"prim":{"kind":"gaussian","a":0.8}}]},"u1":{"terms":[{"coeff":1.0,"prim":{"kind":"gaussian","a":0.5}}]}}"#;

fn platelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_platelab"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn norm_at_zero_time_without_displacement_is_zero() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", GAUSS_U1);
    let o = platelab(&["norm", "--problem", p.to_str().unwrap(), "--t", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["norm_sq"], 0.0);
    assert_eq!(v["norm"], 0.0);
}

#[test]
fn norm_csv_has_header_and_one_row() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", GAUSS_U1);
    let o = platelab(&[
        "norm",
        "--problem",
        p.to_str().unwrap(),
        "--t",
        "10",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["t", "norm_sq", "err", "norm"]);
    assert_eq!(rows.len(), 2);
    let sq: f64 = rows[1][1].parse().unwrap();
    let n: f64 = rows[1][3].parse().unwrap();
    assert!((n * n - sq).abs() < 1e-12 * sq);
}

#[test]
fn malformed_problem_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", "{\"n\": ");
    let o = platelab(&["norm", "--problem", p.to_str().unwrap(), "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let missing = platelab(&["norm", "--problem", "/nonexistent/p.json", "--t", "1"]);
    assert_eq!(missing.status.code(), Some(2));
    let negative = platelab(&["norm", "--problem", p.to_str().unwrap(), "--t", "-1"]);
    assert_eq!(negative.status.code(), Some(2));
}

#[test]
fn series_default_grid_has_thirteen_rows() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", GAUSS_U1);
    let out = dir.path().join("s.csv");
    let o = platelab(&[
        "series",
        "--problem",
        p.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["t", "value", "err"]);
    assert_eq!(rows.len(), 14);
    let t0: f64 = rows[1][0].parse().unwrap();
    let t1: f64 = rows[13][0].parse().unwrap();
    assert!((t0 - 1e2).abs() < 1e-9 && (t1 - 1e6).abs() < 1e-3);
}

#[test]
fn series_energy_is_constant() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", GAUSS_BOTH);
    let o = platelab(&[
        "series",
        "--problem",
        p.to_str().unwrap(),
        "--quantity",
        "energy",
        "--times",
        "0,0.1,1,10,100,1000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let values: Vec<f64> = csv_rows(&stdout(&o))[1..]
        .iter()
        .map(|r| r[1].parse().unwrap())
        .collect();
    assert_eq!(values.len(), 6);
    for v in &values {
        assert!(((v - values[0]) / values[0]).abs() < 1e-8);
    }
}

#[test]
fn series_rejects_bad_grids() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", GAUSS_U1);
    let p = p.to_str().unwrap();
    assert_eq!(
        platelab(&["series", "--problem", p, "--count", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        platelab(&["series", "--problem", p, "--times", "10,1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        platelab(&["series", "--problem", p, "--times", ""]).status.code(),
        Some(2)
    );
}

#[test]
fn fit_recovers_power_and_constant() {
    let dir = TempDir::new().unwrap();
    let rows: String = [1.0f64, 10.0, 100.0, 1000.0, 1e4]
        .iter()
        .map(|t| format!("{t},{}\n", t.powf(1.5)))
        .collect();
    let f = write(dir.path(), "pow.csv", &format!("t,value\n{rows}"));
    let o = platelab(&["fit", "-i", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["exponent"].as_f64().unwrap() - 1.5).abs() < 1e-9);

    let f = write(
        dir.path(),
        "flat.csv",
        "t,value,err\n1,2,0\n10,2,0\n100,2,0\n1000,2,0\n",
    );
    let o = platelab(&["fit", "-i", f.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["exponent"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn fit_needs_enough_points() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "short.csv", "t,value\n1,1\n10,2\n");
    let o = platelab(&["fit", "-i", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn series_output_feeds_fit() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", GAUSS_U1);
    let s = dir.path().join("s.csv");
    let fit = dir.path().join("fit.json");
    assert_eq!(
        platelab(&[
            "series",
            "--problem",
            p.to_str().unwrap(),
            "-o",
            s.to_str().unwrap()
        ])
        .status
        .code(),
        Some(0)
    );
    let o = platelab(&["fit", "-i", s.to_str().unwrap(), "-o", fit.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(fit).unwrap()).unwrap();
    assert_eq!(v["model"], "power");
    assert!((v["exponent"].as_f64().unwrap() - 1.5).abs() < 0.04);
}

#[test]
fn verify_single_scenario_passes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v.json");
    let o = platelab(&["verify", "THM_1_1", "--n", "2", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS THM_1_1(n=2)"));
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 1);
    assert!(!v["reports"][0]["checks"].as_array().unwrap().is_empty());
}

#[test]
fn verify_starved_quadrature_fails() {
    let o = platelab(&[
        "verify",
        "THM_1_1",
        "--n",
        "1",
        "--rel-tol",
        "1e-300",
        "--abs-tol",
        "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));
}

#[test]
fn verify_unknown_scenario_is_usage_error() {
    assert_eq!(platelab(&["verify", "THM_9_9"]).status.code(), Some(2));
    assert_eq!(
        platelab(&["verify", "THM_1_1", "--n", "7"]).status.code(),
        Some(2)
    );
}

#[test]
fn sweep_classifies_cells() {
    let o = platelab(&["sweep", "--sigmas", "1,2", "--ns", "1,4,6"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["sigma", "n", "class", "alpha"]);
    let class = |s: &str, n: &str| {
        rows.iter()
            .find(|r| r[0] == s && r[1] == n)
            .map(|r| r[2].clone())
            .unwrap()
    };
    assert_eq!(class("1", "1"), "Power");
    assert_eq!(class("2", "4"), "Log");
    assert_eq!(class("2", "6"), "Bounded");
    assert_eq!(class("1", "6"), "Bounded");
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(platelab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(platelab(&[]).status.code(), Some(2));
}
