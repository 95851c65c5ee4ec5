use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use weilforms::cli::{run, Outcome};

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn go(args: &[&str]) -> Outcome {
    run(std::iter::once("weilforms").chain(args.iter().copied()))
}

fn ok_json(args: &[&str]) -> Value {
    let out = go(args);
    assert_eq!(out.code, 0, "stderr: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn error_of(out: &Outcome) -> Value {
    serde_json::from_str(out.stderr.trim()).unwrap()
}

#[test]
fn dim_of_the_weight_five_module() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g5.json", r#"{"gram": [[2, 1], [1, -2]]}"#);
    let v = ok_json(&["--no-cache", "dim", "--gram", g.to_str().unwrap(), "--weight", "5"]);
    assert_eq!(v["dim_s"], 1);
    assert_eq!(v["weight"], "5");
}

#[test]
fn r_series_then_shimura_lift_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "n2.json", r#"{"gram": [[-4]]}"#);
    let out = go(&["--no-cache", "r-series", "--gram", g.to_str().unwrap(), "--weight", "11/2", "--m", "1/8", "--beta", "3", "--prec", "4"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let f = write(dir.path(), "f.json", &out.stdout);
    let s = write(dir.path(), "s.json", r#"{"gram": [[4]]}"#);
    let v = ok_json(&[
        "--no-cache", "theta-lift", "--gram", s.to_str().unwrap(), "--input", f.to_str().unwrap(), "--weight", "5", "--bound", "5",
        "--format", "scalar",
    ]);
    let got: Vec<(String, String)> = v["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| (t["n"].as_str().unwrap().to_string(), t["c"].as_str().unwrap().to_string()))
        .collect();
    let want: Vec<(String, String)> =
        [(1, 1), (2, 16), (3, -156), (4, 256), (5, 870)].iter().map(|(n, c)| (n.to_string(), c.to_string())).collect();
    assert_eq!(got, want);
}

#[test]
fn doi_naganuma_reports_hilbert_indices() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "d5.json", r#"{"gram": [[2, 1], [1, -2]]}"#);
    let out = go(&[
        "--no-cache", "r-series", "--gram", g.to_str().unwrap(), "--negate", "--weight", "5", "--m", "1/5", "--beta-dual", "2/5,1/5",
        "--prec", "6",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let f = write(dir.path(), "f.json", &out.stdout);
    let v = ok_json(&["--no-cache", "doi-naganuma", "--d", "5", "--input", f.to_str().unwrap(), "--bound", "3"]);
    let coeffs = v["coeffs"].as_array().unwrap();
    assert!(!coeffs.is_empty());
    assert!(coeffs.iter().all(|t| t["nu"]["d"] == 5));
    assert_eq!(v["weight"], 5);
}

#[test]
fn cold_and_warm_cache_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let g = write(dir.path(), "a2.json", r#"{"gram": [[2]]}"#);
    let args = ["--cache-dir", cache.to_str().unwrap(), "eisenstein", "--gram", g.to_str().unwrap(), "--weight", "7/2", "--prec", "4"];
    let cold = go(&args);
    assert_eq!(cold.code, 0, "{}", cold.stderr);
    let entries = fs::read_dir(cache.join("v1")).unwrap().count();
    assert!(entries > 0);
    let warm = go(&args);
    assert_eq!(cold, warm);
    let v: Value = serde_json::from_str(&warm.stdout).unwrap();
    let c: Vec<&str> = v["coeffs"].as_array().unwrap().iter().map(|t| t["c"].as_str().unwrap()).collect();
    assert!(c.contains(&"56") && c.contains(&"126"));
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", r#"{"gram": [[-2, -1], [-1, 2]]}"#);
    let base = ["--no-cache", "cusp-basis", "--gram", g.to_str().unwrap(), "--weight", "5", "--prec", "4"];
    let one = go(&[&base[..], &["--threads", "1"]].concat());
    let four = go(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one.code, 0, "{}", one.stderr);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn malformed_gram_is_an_input_error_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "bad.json", "{\"gram\": [[2, 1],\n [1 2]]}");
    let out = go(&["--no-cache", "fqm-info", "--gram", g.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    let e = error_of(&out);
    assert_eq!(e["error"]["kind"], "parse");
    assert!(e["error"]["message"].as_str().unwrap().contains("bad.json:2:5"));
}

#[test]
fn math_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let odd = write(dir.path(), "odd.json", r#"{"gram": [[3]]}"#);
    let out = go(&["--no-cache", "dim", "--gram", odd.to_str().unwrap(), "--weight", "5"]);
    assert_eq!((out.code, error_of(&out)["error"]["kind"].as_str().unwrap()), (2, "invalid_lattice"));

    let out = go(&["--no-cache", "weight3", "--n", "7", "--prec", "3"]);
    assert_eq!(out.code, 2);

    // the lift needs Q(λ) = 9/2 but the input stops at 4
    let g = write(dir.path(), "n2.json", r#"{"gram": [[-4]]}"#);
    let f = go(&["--no-cache", "r-series", "--gram", g.to_str().unwrap(), "--weight", "11/2", "--m", "1/8", "--beta", "3", "--prec", "4"]);
    let fp = write(dir.path(), "f.json", &f.stdout);
    let s = write(dir.path(), "s.json", r#"{"gram": [[4]]}"#);
    let out = go(&["--no-cache", "theta-lift", "--gram", s.to_str().unwrap(), "--input", fp.to_str().unwrap(), "--weight", "5", "--bound", "6"]);
    assert_eq!(out.code, 4);
    assert_eq!(error_of(&out)["error"]["kind"], "precision");
}

#[test]
fn table_output() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "n2.json", r#"{"gram": [[-4]]}"#);
    let out = go(&["--format", "table", "--no-cache", "fqm-info", "--gram", g.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("order 4  invariants [4]  level 8  signature 7\n"));
    assert!(out.stdout.contains("gamma"));
    let out = go(&["--format", "table", "class-identity", "--prop10", "i", "--n-max", "5"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().count(), 6);
    assert!(out.stdout.lines().skip(1).all(|l| l.ends_with("true")));
}

#[test]
fn hurwitz_and_identities_in_json() {
    assert_eq!(go(&["hurwitz", "--d", "12"]).stdout, "\"4/3\"\n");
    let v = ok_json(&["class-identity", "--prop10", "ii", "--n-max", "12"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[2]["lhs"], "-8/15");
}
