use std::path::PathBuf;
use std::process::{Command, Output};

use num_complex::Complex64;
use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn measure(name: &str) -> String {
    root().join("measures").join(format!("{name}.measure")).display().to_string()
}

fn subord(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subord")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn verify_default_passes_with_exact_zeros() {
    let out = subord(&["verify-coalgebra", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = json(&out);
    let suites = report["suites"].as_array().unwrap();
    assert!(suites.iter().all(|s| s["nonzero"] == 0 && s["max_abs_residual"] == 0.0));
    let names: Vec<&str> = suites.iter().map(|s| s["suite"].as_str().unwrap()).collect();
    for needed in ["coassociativity", "leibniz", "star", "morphism", "psi-expmorph", "psi-probabilistic", "conjugate-variable", "markov"] {
        assert!(names.contains(&needed), "missing {needed}");
    }
}

#[test]
fn corrupted_unit_rule_fails() {
    let out = subord(&["verify-coalgebra", "--corrupt", "--degree", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAILED"));
}

#[test]
fn low_degree_subset_passes() {
    let out = subord(&["verify-coalgebra", "--degree", "2", "--alpha", "1/2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn degree_over_cap_is_an_explicit_error() {
    let out = subord(&["verify-coalgebra", "--degree", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("degree 9 exceeds the cap"));
}

fn moments(report: &Value) -> Vec<String> {
    report["moments"].as_array().unwrap().iter().map(|m| m["value"].as_str().unwrap().to_string()).collect()
}

#[test]
fn bernoulli_at_time_two_has_arcsine_moments() {
    let out = subord(&["compress", &measure("bernoulli"), "--t", "2", "--degree", "4", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(moments(&json(&out)), ["1", "0", "2", "0", "6"]);
    let via_alpha = subord(&["compress", &measure("bernoulli"), "--alpha", "1/2", "--degree", "4", "--json"]);
    assert_eq!(moments(&json(&via_alpha)), ["1", "0", "2", "0", "6"]);
}

#[test]
fn time_one_echoes_the_input_moments() {
    let out = subord(&["compress", &measure("delta-mixture"), "--t", "1", "--degree", "3", "--json"]);
    // Atoms −1, 0, 2 with weight 1/3: m = (1, 1/3, 5/3, 7/3).
    assert_eq!(moments(&json(&out)), ["1", "1/3", "5/3", "7/3"]);
}

#[test]
fn semicircle_at_time_three_has_variance_three_density() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("density.csv");
    let out = subord(&[
        "compress",
        &measure("semicircle"),
        "--t",
        "3",
        "--grid",
        "-3:3:13",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("m_2   3") && text.contains("m_4   18"), "{text}");
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["x", "density"]);
    for row in reader.records() {
        let row = row.unwrap();
        let (x, d): (f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        let exact = (12.0 - x * x).max(0.0).sqrt() / (6.0 * std::f64::consts::PI);
        assert!((d - exact).abs() < 1e-6, "x = {x}: {d} vs {exact}");
    }
}

#[test]
fn subordination_at_two_i_matches_the_quadratic_root() {
    let out = subord(&["subordinate", &measure("bernoulli"), "--t", "2", "--grid", "2i", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let row = &json(&out)["rows"][0];
    let f = Complex64::new(row["f_re"].as_f64().unwrap(), row["f_im"].as_f64().unwrap());
    // F² − zF + 1 = 0 at z = 2i, root with F ~ z.
    let z = Complex64::new(0.0, 2.0);
    let root = 0.5 * (z + (z - 2.0).sqrt() * (z + 2.0).sqrt());
    assert!((root - Complex64::new(0.0, 1.0 + 2f64.sqrt())).norm() < 1e-15);
    assert!((f - root).norm() < 1e-10, "{f} vs {root}");
    assert!(row["residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn time_one_is_the_identity() {
    let out = subord(&["subordinate", &measure("delta-mixture"), "--t", "1", "--grid", "-2:2:5,0.05:2:4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    for row in json(&out)["rows"].as_array().unwrap() {
        assert_eq!(row["f_re"], row["z_re"]);
        assert_eq!(row["f_im"], row["z_im"]);
    }
}

#[test]
fn semicircle_grid_residuals_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("f.csv");
    let out = subord(&[
        "subordinate",
        &measure("semicircle"),
        "--t",
        "2",
        "--grid",
        "-3:3:10,0.05:3:10",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["z_re", "z_im", "f_re", "f_im", "residual", "status"]);
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 100);
    for r in &rows {
        assert_eq!(&r[5], "ok");
        assert!(r[4].parse::<f64>().unwrap() < 1e-10);
        assert!(r[3].parse::<f64>().unwrap() >= r[1].parse::<f64>().unwrap());
    }
}

#[test]
fn grid_below_the_floor_is_rejected() {
    let out = subord(&["subordinate", &measure("semicircle"), "--t", "2", "--grid", "-1:1:3,0.01:1:3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Im z < 0.05"));
}

#[test]
fn malformed_measure_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.measure");
    std::fs::write(&path, "schema_version = 1\nname = \"bad\"\n\n[[atoms]]\nx = \"one\"\nw = \"1\"\n").unwrap();
    let out = subord(&["compress", path.to_str().unwrap(), "--t", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr(&out);
    assert!(e.contains("line 5") && e.contains("atoms[0].x"), "{e}");
}

#[test]
fn density_command_inverts_the_transform() {
    let out = subord(&["density", &measure("semicircle"), "--grid", "0:1:2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    let d0 = rows[0]["density"].as_f64().unwrap();
    let d1 = rows[1]["density"].as_f64().unwrap();
    assert!((d0 - 1.0 / std::f64::consts::PI).abs() < 1e-6);
    assert!((d1 - 3f64.sqrt() / (2.0 * std::f64::consts::PI)).abs() < 1e-6);

    let out = subord(&["density", &measure("bernoulli"), "--grid", "-1:1:3"]);
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,density,atom_mass"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!((first[2].parse::<f64>().unwrap() - 0.5).abs() < 1e-6, "{text}");
}
