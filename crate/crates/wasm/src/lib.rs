//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string. Failures come back as `{"error": ...}`
//! so the page never has to catch a JavaScript exception.

use qdilate::cpmap::CpMap;
use qdilate::examples::{bloch_state, cloning_fidelity_closed_form, ideal_teleportation, telecloning};
use qdilate::instrument::{Instrument, Outcome};
use qdilate::linmat::{paulis, projector, ComplexMatrix};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Keeps the demo responsive; larger cases belong to the CLI.
const MAX_CLONE_DIM: usize = 3;
const MAX_COPIES: usize = 4;
const MAX_TELEPORT_DIM: usize = 5;
const MAX_SHOTS: usize = 1_000_000;

fn to_json(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn checks(report: &qdilate::report::VerificationReport) -> Vec<Value> {
    report
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "residual": c.residual, "tolerance": c.tolerance, "passed": c.passed }))
        .collect()
}

pub fn clone_fidelity_value(d: usize, n: usize, m: usize) -> Result<Value, String> {
    if !(2..=MAX_CLONE_DIM).contains(&d) || n == 0 || m < n || m > MAX_COPIES {
        return Err(format!("supported range: 2 <= d <= {MAX_CLONE_DIM}, 1 <= N <= M <= {MAX_COPIES}"));
    }
    let ex = telecloning(d, n, m, 1e-10).map_err(|e| e.to_string())?;
    Ok(json!({
        "d": d, "N": n, "M": m,
        "frame": ex.frame_name,
        "fidelity": ex.fidelity,
        "closed_form": cloning_fidelity_closed_form(d, n, m),
        "passed": ex.schemes.report.passed(),
        "checks": checks(&ex.schemes.report),
    }))
}

pub fn teleport_residuals_value(d: usize) -> Result<Value, String> {
    if !(2..=MAX_TELEPORT_DIM).contains(&d) {
        return Err(format!("supported range: 2 <= d <= {MAX_TELEPORT_DIM}"));
    }
    let s = ideal_teleportation(d, 1e-10).map_err(|e| e.to_string())?;
    Ok(json!({
        "d": d,
        "outcomes": s.spec.len(),
        "passed": s.report.passed(),
        "checks": checks(&s.report),
    }))
}

/// Projective measurement of the Pauli observable `axis` on a qubit pure state.
pub fn sample_histogram_value(axis: &str, theta: f64, phi: f64, shots: usize, seed: u64) -> Result<Value, String> {
    if shots == 0 || shots > MAX_SHOTS {
        return Err(format!("shots must be in 1..={MAX_SHOTS}"));
    }
    let [id, x, y, z] = paulis();
    let obs = match axis {
        "x" => x,
        "y" => y,
        "z" => z,
        other => return Err(format!("unknown axis '{other}', expected x, y or z")),
    };
    let half = qdilate::linmat::c(0.5, 0.0);
    let outcomes = [("+1", &id + &obs), ("-1", &id - &obs)]
        .into_iter()
        .map(|(label, p)| {
            let p: ComplexMatrix = p * half;
            Ok(Outcome::new(label, 1.0, CpMap::from_kraus(vec![p]).map_err(|e| e.to_string())?))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let instr = Instrument::new(2, 2, outcomes).map_err(|e| e.to_string())?;
    let rho = projector(&bloch_state(theta, phi));
    let probs = instr.probabilities(&rho).map_err(|e| e.to_string())?;
    let counts = instr.sample_counts(&rho, shots, seed).map_err(|e| e.to_string())?;
    let bins: Vec<Value> = instr
        .outcomes()
        .iter()
        .zip(probs.iter().zip(&counts))
        .map(|(o, (p, n))| json!({ "label": o.label, "count": n, "frequency": *n as f64 / shots as f64, "probability": p }))
        .collect();
    Ok(json!({ "axis": axis, "shots": shots, "seed": seed, "outcomes": bins }))
}

#[wasm_bindgen]
pub fn clone_fidelity(d: usize, n: usize, m: usize) -> String {
    to_json(clone_fidelity_value(d, n, m))
}

#[wasm_bindgen]
pub fn teleport_residuals(d: usize) -> String {
    to_json(teleport_residuals_value(d))
}

#[wasm_bindgen]
pub fn sample_histogram(axis: &str, theta: f64, phi: f64, shots: usize, seed: u64) -> String {
    to_json(sample_histogram_value(axis, theta, phi, shots, seed))
}
