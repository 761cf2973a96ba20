use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_qdilate");

fn matrix(rows: usize, cols: usize, real: &[f64]) -> Value {
    json!({ "rows": rows, "cols": cols, "entries": real.iter().map(|x| [*x, 0.0]).collect::<Vec<_>>() })
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(BIN).args(args).arg("--format").arg("json").output().unwrap();
    let code = out.status.code().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(&text).unwrap_or(Value::Null);
    (code, report)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn z_measurement() -> Value {
    json!({
        "d_in": 2, "d_out": 2,
        "outcomes": [
            { "label": "0", "weight": 1.0, "density": { "kraus": [matrix(2, 2, &[1.0, 0.0, 0.0, 0.0])] } },
            { "label": "1", "weight": 1.0, "density": { "kraus": [matrix(2, 2, &[0.0, 0.0, 0.0, 1.0])] } },
        ]
    })
}

#[test]
fn identity_and_dephasing_ancilla_dimensions() {
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.json", &json!({ "kraus": [matrix(2, 2, &[1.0, 0.0, 0.0, 1.0])] }));
    let (code, r) = run(&["dilate-map", path(&id)]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["result"]["dilation"]["ancilla_dim"], 1);
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);

    let deph = write(
        &dir,
        "deph.json",
        &json!({ "kraus": [matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]), matrix(2, 2, &[0.0, 0.0, 0.0, 1.0])] }),
    );
    let (code, r) = run(&["dilate-map", path(&deph)]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["result"]["dilation"]["ancilla_dim"], 2);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn malformed_input_exits_with_parse_code() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{ not json").unwrap();
    let (code, r) = run(&["dilate-map", path(&p)]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], "parse");
    let bad_shape = write(&dir, "shape.json", &json!({ "kraus": [{ "rows": 2, "cols": 2, "entries": [[1.0, 0.0]] }] }));
    assert_eq!(run(&["dilate-map", path(&bad_shape)]).0, 2);
    let out = Command::new(BIN).args(["dilate-map"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn instrument_dilation_and_normalization_failure() {
    let dir = TempDir::new().unwrap();
    let z = write(&dir, "z.json", &z_measurement());
    let (code, r) = run(&["dilate-instrument", path(&z)]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["result"]["dilation"]["ancilla_dim"], 2);

    let mut half = z_measurement();
    half["outcomes"].as_array_mut().unwrap().pop();
    let half = write(&dir, "half.json", &half);
    let (code, r) = run(&["dilate-instrument", path(&half)]);
    assert_eq!(code, 3);
    assert_eq!(r["error"]["kind"], "precondition");
}

#[test]
fn teleport_schemes_and_tightness_precondition() {
    let dir = TempDir::new().unwrap();
    let h = 0.5f64.sqrt();
    let seed = json!({ "kraus": [matrix(2, 2, &[h, 0.0, 0.0, h])] });
    let spec = write(
        &dir,
        "pauli.json",
        &json!({ "frame": "pauli", "seed_map": seed, "conditional_channels": "unitary-from-frame" }),
    );
    let (code, r) = run(&["teleport", path(&spec), "--kind", "nonminimal"]);
    assert_eq!(code, 0, "{r}");
    let (code, r) = run(&["teleport", path(&spec), "--kind", "minimal", "--cross"]);
    assert_eq!(code, 0, "{r}");
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["name"] == "minimal-vs-nonminimal"));

    let generic = json!({
        "d": 2,
        "members": [
            { "weight": 1.0, "op": matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]) },
            { "weight": 1.0, "op": matrix(2, 2, &[0.0, 0.0, 0.0, 1.0]) },
            { "weight": 1.0, "op": matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]) },
        ]
    });
    let bad = write(&dir, "generic.json", &json!({ "frame": generic, "seed_map": seed }));
    let (code, r) = run(&["teleport", path(&bad)]);
    assert_eq!(code, 3, "{r}");
}

#[test]
fn examples_report_closed_forms() {
    let (code, r) = run(&["example", "clone"]);
    assert_eq!(code, 0);
    assert!((r["result"]["fidelity"].as_f64().unwrap() - 5.0 / 6.0).abs() < 1e-9);
    let (code, r) = run(&["example", "teleport", "--d", "3"]);
    assert_eq!(code, 0, "{r}");
    let (code, r) = run(&["example", "unot"]);
    assert_eq!(code, 0, "{r}");
    assert!((r["result"]["fidelity"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-9);
    assert_eq!(run(&["example", "clone", "--N", "3", "--M", "2"]).0, 3);
}

#[test]
fn sampling_frequencies_and_reproducibility() {
    let dir = TempDir::new().unwrap();
    let z = write(&dir, "z.json", &z_measurement());
    let h = 0.5f64.sqrt();
    let plus = write(&dir, "plus.json", &matrix(2, 1, &[h, h]));
    let zero = write(&dir, "zero.json", &matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]));

    let (code, a) = run(&["sample", path(&z), "--state", path(&plus), "--seed", "5"]);
    assert_eq!(code, 0, "{a}");
    let f0 = a["result"]["outcomes"][0]["frequency"].as_f64().unwrap();
    assert!((f0 - 0.5).abs() < 0.005, "{f0}");
    let (_, b) = run(&["sample", path(&z), "--state", path(&plus), "--seed", "5"]);
    assert_eq!(a["result"]["outcomes"], b["result"]["outcomes"]);

    let (code, r) = run(&["sample", path(&z), "--state", path(&zero), "--n", "1000"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["outcomes"][0]["frequency"], 1.0);
    assert!(r["result"]["outcomes"][1]["posterior"].is_null());

    let not_density = write(&dir, "bad.json", &matrix(2, 2, &[1.0, 0.0, 0.0, 1.0]));
    assert_eq!(run(&["sample", path(&z), "--state", path(&not_density)]).0, 3);
}

#[test]
fn text_output_lists_checks() {
    let out = Command::new(BIN).args(["example", "clone"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS single-clone-fidelity"));
    assert!(text.contains("seed "));
}
