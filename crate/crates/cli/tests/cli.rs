use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn unimod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unimod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = unimod(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn err_json(args: &[&str], code: i32) -> Value {
    let out = unimod(args);
    assert_eq!(out.status.code(), Some(code), "{}", String::from_utf8_lossy(&out.stdout));
    let v: Value = serde_json::from_slice(&out.stderr).expect("json error");
    v["error"].clone()
}

fn write(dir: &tempfile::TempDir, name: &str, v: &Value) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn coefficient(series: &Value, exponent: &str) -> Option<String> {
    series["terms"]
        .as_array()?
        .iter()
        .find(|t| t[0] == exponent)
        .map(|t| t[1].as_str().unwrap().to_string())
}

#[test]
fn solve_dimension_72() {
    let v = ok_json(&["theta", "solve", "--n", "72", "--min", "7", "--shadow", "2=2", "--shadow", "4=0"]);
    assert_eq!(v["a"][7], "-983040");
    assert_eq!(v["a"][8], "33554432");
    assert_eq!(coefficient(&v["theta_L"], "7").as_deref(), Some("27918336"));
    assert_eq!(coefficient(&v["theta_S"], "6").as_deref(), Some("127800"));
    assert_eq!(v["conditions"], serde_json::json!([]));
}

#[test]
fn bound_table() {
    let v = ok_json(&["theta", "bound", "--n", "23"]);
    assert_eq!(v["bound"], 3);
    assert_eq!(v["optimal_odd"], Value::Null);
    let v = ok_json(&["theta", "bound", "--n", "72"]);
    assert_eq!((v["bound"].as_u64(), v["bound_forces_even"].as_bool(), v["optimal_odd"].as_u64()), (Some(8), Some(true), Some(7)));
}

#[test]
fn analyze_rank_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "z1.json", &serde_json::json!({"rank": 1, "gram": [["1"]]}));
    let v = ok_json(&["lattice", "analyze", &f]);
    assert_eq!(v["min_norm"], "1");
    assert_eq!(v["unimodular"], true);
    assert_eq!(v["even"], false);
}

#[test]
fn exit_codes() {
    let e = err_json(&["lattice", "analyze", "/nonexistent/file.json"], 2);
    assert_eq!(e["kind"], "missing_input");
    let e = err_json(&["theta", "solve", "--n", "72"], 2);
    assert_eq!(e["kind"], "missing_input");
    let e = err_json(&["theta", "solve", "--n", "72", "--min", "seven"], 2);
    assert_eq!(e["kind"], "malformed_input");
    let e = err_json(&["theta", "solve", "--n", "72", "--min", "7", "--shadow", "2:2"], 2);
    assert_eq!(e["kind"], "malformed_input");
    let e = err_json(&["theta", "bound", "--n", "8", "--bogus"], 2);
    assert_eq!(e["kind"], "usage");
    let e = err_json(&["theta", "solve", "--n", "72", "--min", "7"], 1);
    assert_eq!(e["kind"], "underdetermined");
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let e = err_json(&["lattice", "analyze", bad.to_str().unwrap()], 2);
    assert_eq!(e["kind"], "malformed_input");
    let e = err_json(&["lattice", "neighbor", data("z2.json").to_str().unwrap()], 1);
    assert_eq!(e["kind"], "not_even_unimodular");
}

#[test]
fn byte_identical_output() {
    let e8 = data("e8.json");
    let args = ["lattice", "neighbor", e8.to_str().unwrap()];
    let a = unimod(&args).stdout;
    let b = unimod(&args).stdout;
    let mut single = vec!["--threads", "1"];
    single.extend(args);
    let c = unimod(&single).stdout;
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn neighbor_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok_json(&["lattice", "neighbor", data("e8.json").to_str().unwrap()]);
    assert_eq!(v["report"]["failed"], serde_json::json!([]));
    assert_eq!(v["report"]["shadow_min"], "2");
    let f = write(&dir, "gamma.json", &v);
    let a = ok_json(&["lattice", "analyze", &f]);
    assert_eq!((a["unimodular"].as_bool(), a["even"].as_bool()), (Some(true), Some(false)));
    let s = ok_json(&["lattice", "shadow", &f, "--theta-up-to", "4"]);
    assert_eq!(s["shadow_min"], "2");
    assert_eq!(coefficient(&s["shadow_theta"], "2").as_deref(), Some("256"));
}

#[test]
fn neighbor_with_explicit_x() {
    let v = ok_json(&["lattice", "neighbor", data("e8.json").to_str().unwrap(), "--x", "0,0,0,0,0,1,-1,-1"]);
    assert_eq!(v["x"], serde_json::json!(["0", "0", "0", "0", "0", "1", "-1", "-1"]));
    let capped = ok_json(&[
        "--rank-cap",
        "4",
        "lattice",
        "neighbor",
        data("e8.json").to_str().unwrap(),
        "--x",
        "0,0,0,0,0,1,-1,-1",
    ]);
    assert_eq!(capped["report"]["min_norm"], Value::Null);
    assert_eq!(capped["report"]["skipped_by_rank_cap"].as_array().unwrap().len(), 4);
}

#[test]
fn series_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let solved = ok_json(&["theta", "solve", "--n", "72", "--min", "7", "--shadow", "2=2", "--shadow", "4=0"]);
    let f = write(&dir, "solution.json", &solved);
    let c = ok_json(&["theta", "check", "--n", "72", "--min", "7", "--shadow-file", &f]);
    assert_eq!(c["satisfied"], true);
    let t2 = ok_json(&["series", "expand", "theta2", "--precision", "6"]);
    assert_eq!(coefficient(&t2, "1/4").as_deref(), Some("2"));
    let f = write(&dir, "t2.json", &t2);
    let c = ok_json(&["theta", "check", "--n", "1", "--min", "1", "--shadow-file", &f]);
    assert_eq!(c["satisfied"], true);
}

#[test]
fn code_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let c22 = data("c22.txt");
    let v = ok_json(&["code", "check", c22.to_str().unwrap()]);
    assert_eq!(v["self_dual"], true);
    assert_eq!(v["min_euclidean_weight"], 8);
    let f = write(&dir, "code.json", &v);
    assert_eq!(ok_json(&["code", "check", &f]), v);
    let l = ok_json(&["code", "lattice", c22.to_str().unwrap()]);
    assert_eq!(l["unimodular"], true);
    let f = write(&dir, "a.json", &l);
    assert_eq!(ok_json(&["lattice", "analyze", &f])["min_norm"], "1");
    let raw = ok_json(&["code", "lattice", c22.to_str().unwrap(), "--unscaled"]);
    assert_eq!(raw["determinant"], "64");
    let fc = ok_json(&[
        "code",
        "from-frame",
        data("z2.json").to_str().unwrap(),
        "--frame-file",
        data("z2_frame.json").to_str().unwrap(),
    ]);
    assert_eq!(fc["generators"], serde_json::json!([[2, 2], [2, 6]]));
}

#[test]
fn frame_to_code() {
    let dir = tempfile::tempdir().unwrap();
    let e8 = data("e8.json");
    let fr = ok_json(&["lattice", "frame", e8.to_str().unwrap(), "--k", "8"]);
    assert!(fr["frame"].is_object());
    let f = write(&dir, "frame.json", &fr);
    let c = ok_json(&["code", "from-frame", e8.to_str().unwrap(), "--frame-file", &f]);
    assert_eq!(c["self_dual"], true);
    assert_eq!(c["size"], "4096");
}

#[test]
fn text_output() {
    let out = unimod(&["series", "expand", "theta3", "--precision", "5", "--output", "text"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1 + 2q + 2q^4 + O(q^5)\n");
    let out = unimod(&["--output", "text", "lattice", "analyze", "/nonexistent"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error (missing_input)"));
}
