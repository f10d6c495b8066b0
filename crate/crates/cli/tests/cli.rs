use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn posflag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posflag"))
        .args(args)
        .output()
        .expect("failed to launch posflag")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "posflag failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is not JSON")
}

fn temp_file(name: &str, contents: &[u8]) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("posflag-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn generate(name: &str, args: &[&str]) -> PathBuf {
    let out = posflag(&[&["gen"], args].concat());
    json(&out);
    temp_file(name, &out.stdout)
}

fn scalar_const(exp: &str) -> Value {
    serde_json::json!({ "num": [[exp, "1"]], "den": [["0", "1"]] })
}

fn marking(name: &str, entries: Vec<Value>) -> Value {
    serde_json::json!({ "name": name, "basis": { "rows": 3, "cols": 3, "entries": entries } })
}

#[test]
fn gen_is_deterministic() {
    let a = posflag(&["gen", "--d", "4", "--t", "4", "--seed", "11"]);
    let b = posflag(&["gen", "--d", "4", "--t", "4", "--seed", "11"]);
    let c = posflag(&["gen", "--d", "4", "--t", "4", "--seed", "12"]);
    assert_eq!(json(&a), json(&b));
    assert_ne!(json(&a), json(&c));
}

#[test]
fn gen_rejects_small_dimension() {
    let out = posflag(&["gen", "--d", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invariants_recover_generating_coordinates() {
    let path = generate("tuple.json", &["--d", "3", "--seed", "5"]);
    let generated: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let inv = json(&posflag(&["invariants", path.to_str().unwrap()]));
    assert_eq!(inv["d"], 3);
    assert_eq!(inv["t"], 3);
    // a single triangle has no interior edges
    assert_eq!(inv["count"], 1);
    assert_eq!(inv["all_positive"], true);
    assert_eq!(inv["coordinates"], generated["coordinates"]);
}

#[test]
fn invariants_reject_degenerate_tuples() {
    let path = generate("dup.json", &["--d", "3", "--seed", "2"]);
    let mut tuple: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let first = tuple["flags"][0].clone();
    tuple["flags"][1] = first;
    let path = temp_file("dup-edited.json", tuple.to_string().as_bytes());
    let out = posflag(&["invariants", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("maximum span"));
}

#[test]
fn cones_on_constant_coordinates() {
    let path = generate("const3.json", &["--d", "3", "--seed", "1", "--constants"]);
    let out = json(&posflag(&["cones", path.to_str().unwrap()]));
    assert_eq!(out["verified"], true);
    assert_eq!(out["intersection"]["single_point"], true);
}

#[test]
fn shear_on_constant_coordinates_is_trivial() {
    let path = generate("const4.json", &["--d", "3", "--t", "4", "--seed", "1", "--constants"]);
    let out = json(&posflag(&["shear", path.to_str().unwrap()]));
    assert_eq!(out["verified"], true);
    assert_eq!(out["translation"]["perm"], serde_json::json!([1, 2, 3]));
    assert_eq!(out["translation"]["translation"], serde_json::json!(["0/1", "0/1", "0/1"]));
}

#[test]
fn intersect_explicit_markings() {
    let one = scalar_const("0");
    let zero = serde_json::json!({ "num": [], "den": [["0", "1"]] });
    let t = scalar_const("1");
    let id = marking(
        "id",
        vec![
            one.clone(), zero.clone(), zero.clone(),
            zero.clone(), one.clone(), zero.clone(),
            zero.clone(), zero.clone(), one.clone(),
        ],
    );
    let m = marking(
        "M",
        vec![
            one.clone(), one.clone(), t,
            zero.clone(), one.clone(), one.clone(),
            zero.clone(), zero, one,
        ],
    );
    let input = serde_json::json!({ "markings": [id, m] });
    let path = temp_file("markings.json", input.to_string().as_bytes());
    let out = json(&posflag(&["intersect", path.to_str().unwrap()]));
    assert_eq!(out["verified"], true);
    let constraints = out["intersection"]["constraints"].as_array().unwrap();
    assert!(constraints.iter().any(|c| c == "x3 - x1 <= -1/1"));
    assert_eq!(out["intersection"]["single_point"], false);
}

#[test]
fn verify_field_suite_passes() {
    let out = posflag(&["verify", "--suite", "field", "--trials", "1000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn verify_all_suites_pass() {
    let out = posflag(&["verify", "--trials", "5", "--seed", "1", "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn injected_fault_is_detected() {
    let out = posflag(&[
        "verify", "--suite", "snakes", "--trials", "10", "--inject-fault", "negate-double-ratio",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}
