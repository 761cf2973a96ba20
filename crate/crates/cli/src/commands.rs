use std::time::Instant;

use qdilate::cpmap::{stinespring_minimal, stinespring_uncompressed, stinespring_via_check_operator, verify_stinespring};
use qdilate::error::Error;
use qdilate::examples::{
    bloch_state, cloning_fidelity_closed_form, ideal_teleportation, telecloning, unot_channel, unot_fidelity,
    unot_fidelity_closed_form, unot_grid_output, unot_spec, Su2Design,
};
use qdilate::frameorbit::{nonminimal_support_report, tele_minimal, tele_nonminimal, verify_tele_schemes, SchemeKind};
use qdilate::instrument::{minimal_dilation, verify_dilation};
use qdilate::json::{
    cpmap_from_value, cpmap_to_value, instrument_dilation_to_value, instrument_from_value, matrix_from_value,
    matrix_to_value, scheme_to_value, spec_from_value, spec_to_value, stinespring_to_value, DecodeError,
};
use qdilate::linmat::{dist, hermiticity_residual, trace, ComplexMatrix, HermitianEig, DEFAULT_TOL};
use serde_json::{json, Value};

use crate::report::{ms, RunReport};

/// Failure before any check could run.
#[derive(Debug)]
pub enum Failure {
    Parse(String),
    Precondition(String),
}

impl From<DecodeError> for Failure {
    fn from(e: DecodeError) -> Self {
        match e {
            DecodeError::Invalid(inner) => Failure::Precondition(inner.to_string()),
            other => Failure::Parse(other.to_string()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Precondition(e.to_string())
    }
}

pub type CmdResult = Result<(), Failure>;

pub fn parse_json(text: &str) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Parse(format!("malformed JSON: {e}")))
}

/// Construction cutoffs stay at the library default; `--tol` governs verification.
const BUILD_TOL: f64 = DEFAULT_TOL;

pub fn dilate_map(input: &Value, run: &mut RunReport) -> CmdResult {
    let t = Instant::now();
    let map = cpmap_from_value(input)?;
    run.timings.parse_ms = ms(t.elapsed());

    let t = Instant::now();
    let dil = stinespring_minimal(&map, BUILD_TOL)?;
    let rank = map.choi_rank(BUILD_TOL)?;
    run.timings.construct_ms = ms(t.elapsed());

    let t = Instant::now();
    let tol = run.tolerance;
    run.add(&verify_stinespring(&map, &dil, tol)?);
    run.push("ancilla-equals-choi-rank", dil.ancilla_dim.abs_diff(rank) as f64, 0.0);
    let a = stinespring_uncompressed(&map, BUILD_TOL)?;
    let b = stinespring_via_check_operator(&map, BUILD_TOL)?;
    run.push("check-operator-route", dist(&a, &b), tol);
    run.timings.verify_ms = ms(t.elapsed());

    run.summary.push(format!("d_in {} -> d_out {}, ancilla_dim {} (Choi rank {rank})", map.d_in(), map.d_out(), dil.ancilla_dim));
    run.result = json!({
        "d_in": map.d_in(),
        "d_out": map.d_out(),
        "choi_rank": rank,
        "dilation": stinespring_to_value(&dil),
    });
    Ok(())
}

pub fn dilate_instrument(input: &Value, run: &mut RunReport) -> CmdResult {
    let t = Instant::now();
    let instr = instrument_from_value(input, run.tolerance)?;
    run.timings.parse_ms = ms(t.elapsed());

    let t = Instant::now();
    let dil = minimal_dilation(&instr, BUILD_TOL)?;
    run.timings.construct_ms = ms(t.elapsed());

    let t = Instant::now();
    run.push("instrument-normalization", instr.normalization_residual(), run.tolerance);
    run.add(&verify_dilation(&instr, &dil, run.tolerance)?);
    run.timings.verify_ms = ms(t.elapsed());

    run.summary.push(format!("{} outcomes, ancilla_dim {}", instr.len(), dil.ancilla_dim));
    run.result = json!({ "dilation": instrument_dilation_to_value(&dil) });
    Ok(())
}

pub fn teleport(input: &Value, kind: SchemeKind, cross: bool, run: &mut RunReport) -> CmdResult {
    let t = Instant::now();
    let spec = spec_from_value(input)?;
    run.timings.parse_ms = ms(t.elapsed());
    let tol = run.tolerance;

    let t = Instant::now();
    let scheme = match kind {
        SchemeKind::Minimal => tele_minimal(&spec, BUILD_TOL)?,
        SchemeKind::Nonminimal => tele_nonminimal(&spec, BUILD_TOL)?,
    };
    run.timings.construct_ms = ms(t.elapsed());

    let t = Instant::now();
    run.push("spec-normalization", spec.normalization_residual(), tol);
    let densities: Vec<_> = (0..spec.len()).map(|w| spec.density(w)).collect();
    run.add(&scheme.verify(&densities, tol)?);
    if kind == SchemeKind::Nonminimal {
        run.add(&nonminimal_support_report(&spec, tol)?);
    }
    if cross {
        let (_, _, both) = verify_tele_schemes(&spec, BUILD_TOL)?;
        let mutual = both.get("minimal-vs-nonminimal").map_or(f64::INFINITY, |c| c.residual);
        run.push("minimal-vs-nonminimal", mutual, tol);
    }
    run.timings.verify_ms = ms(t.elapsed());

    run.summary.push(format!(
        "{kind:?} scheme: resource on {}x{}, {} effects on {}x{}",
        scheme.bob_dim,
        scheme.alice_dim,
        scheme.effects.len(),
        scheme.alice_dim,
        scheme.d_in
    ));
    run.result = json!({ "scheme": scheme_to_value(&scheme) });
    Ok(())
}

pub fn example_teleport(d: usize, run: &mut RunReport) -> CmdResult {
    let t = Instant::now();
    let schemes = ideal_teleportation(d, BUILD_TOL)?;
    run.timings.construct_ms = ms(t.elapsed());
    let t = Instant::now();
    reverify(&schemes.report, run);
    run.timings.verify_ms = ms(t.elapsed());
    run.summary.push(format!("ideal teleportation in d={d} with {} Weyl-Heisenberg outcomes", schemes.spec.len()));
    run.result = json!({
        "spec": spec_to_value(&schemes.spec),
        "minimal": scheme_to_value(&schemes.minimal),
        "nonminimal": scheme_to_value(&schemes.nonminimal),
    });
    Ok(())
}

pub fn example_clone(d: usize, n: usize, m: usize, run: &mut RunReport) -> CmdResult {
    if n == 0 || m < n {
        return Err(Failure::Precondition(format!("cloning needs 1 <= N <= M (got N={n}, M={m})")));
    }
    let t = Instant::now();
    let ex = telecloning(d, n, m, BUILD_TOL)?;
    run.timings.construct_ms = ms(t.elapsed());
    let t = Instant::now();
    reverify(&ex.schemes.report, run);
    let expected = cloning_fidelity_closed_form(d, n, m);
    run.push("single-clone-fidelity", (ex.fidelity - expected).abs(), run.tolerance);
    run.timings.verify_ms = ms(t.elapsed());
    run.summary.push(format!(
        "C_{{{n},{m}}} in d={d} via {} frame: single-clone fidelity {:.12} (closed form {expected:.12})",
        ex.frame_name, ex.fidelity
    ));
    run.result = json!({
        "d": d, "N": n, "M": m,
        "frame": ex.frame_name,
        "fidelity": ex.fidelity,
        "fidelity_closed_form": expected,
        "channel": cpmap_to_value(&ex.channel),
        "spec": spec_to_value(&ex.schemes.spec),
        "minimal": scheme_to_value(&ex.schemes.minimal),
        "nonminimal": scheme_to_value(&ex.schemes.nonminimal),
    });
    Ok(())
}

/// Grid oracle size and tolerance for the UNOT example.
const UNOT_GRID_POINTS: usize = 10_000;
const UNOT_GRID_TOL: f64 = 1e-3;

pub fn example_unot(n: usize, run: &mut RunReport) -> CmdResult {
    let t = Instant::now();
    let design = Su2Design::for_unot(n)?;
    let spec = unot_spec(n, design)?;
    let channel = unot_channel(n, design)?;
    let (_, _, schemes) = verify_tele_schemes(&spec, BUILD_TOL)?;
    run.timings.construct_ms = ms(t.elapsed());

    let t = Instant::now();
    let tol = run.tolerance;
    run.push("spec-normalization", spec.normalization_residual(), tol);
    reverify(&schemes, run);
    let expected = unot_fidelity_closed_form(n);
    let probes = [(0.0, 0.0), (1.0, 0.5), (2.2, 4.1)];
    let mut worst = 0.0f64;
    let mut grid_gap = 0.0f64;
    let mut fidelity = 0.0;
    for (k, (theta, phi)) in probes.iter().enumerate() {
        let psi = bloch_state(*theta, *phi);
        let f = unot_fidelity(&channel, &psi, n)?;
        if k == 0 {
            fidelity = f;
        }
        worst = worst.max((f - expected).abs());
        let w = qdilate::examples::symmetric_basis(2, n)?;
        let input = w.adjoint() * qdilate::frameorbit::tensor_power(&psi, n);
        let design_out = channel.apply(&(&input * input.adjoint()))?;
        let grid_out = unot_grid_output(&psi, n, UNOT_GRID_POINTS, run.seed.wrapping_add(k as u64))?;
        grid_gap = grid_gap.max(dist(&design_out, &grid_out));
    }
    run.push("orthogonal-state-fidelity", worst, tol);
    run.push("grid-oracle", grid_gap, UNOT_GRID_TOL);
    run.timings.verify_ms = ms(t.elapsed());

    run.summary.push(format!(
        "UNOT N={n} with the {} design ({} elements): fidelity {fidelity:.12} (closed form {expected:.12})",
        design.name(),
        spec.len()
    ));
    run.result = json!({
        "N": n,
        "design": design.name(),
        "design_size": spec.len(),
        "fidelity": fidelity,
        "fidelity_closed_form": expected,
        "grid_points": UNOT_GRID_POINTS,
        "channel": cpmap_to_value(&channel),
        "spec": spec_to_value(&spec),
    });
    Ok(())
}

pub fn sample(instrument: &Value, state: &Value, shots: usize, run: &mut RunReport) -> CmdResult {
    let t = Instant::now();
    let instr = instrument_from_value(instrument, run.tolerance)?;
    let rho = state_from_value(state, instr.d_in(), run.tolerance)?;
    run.timings.parse_ms = ms(t.elapsed());

    let t = Instant::now();
    let probs = instr.probabilities(&rho)?;
    let counts = instr.sample_counts(&rho, shots, run.seed)?;
    run.timings.construct_ms = ms(t.elapsed());

    let t = Instant::now();
    run.push("probability-sum", (probs.iter().sum::<f64>() - 1.0).abs(), run.tolerance);
    run.timings.verify_ms = ms(t.elapsed());

    let mut outcomes = Vec::new();
    for (i, (o, (&p, &count))) in instr.outcomes().iter().zip(probs.iter().zip(&counts)).enumerate() {
        let freq = count as f64 / shots.max(1) as f64;
        let posterior = if p > 1e-12 {
            Some(matrix_to_value(&(instr.apply_outcome(i, &rho)? / qdilate::linmat::c(p, 0.0))))
        } else {
            None
        };
        run.summary.push(format!("outcome {:>4}: count {count:>8}  frequency {freq:.5}  probability {p:.5}", o.label));
        outcomes.push(json!({
            "label": o.label,
            "count": count,
            "frequency": freq,
            "probability": p,
            "posterior": posterior,
        }));
    }
    run.result = json!({ "shots": shots, "outcomes": outcomes });
    Ok(())
}

/// A state is a density matrix, or a column vector read as a pure state.
fn state_from_value(v: &Value, d: usize, tol: f64) -> Result<ComplexMatrix, Failure> {
    let m = matrix_from_value(v)?;
    let rho = if m.ncols() == 1 {
        let norm = m.norm();
        if norm == 0.0 {
            return Err(Failure::Precondition("state vector is zero".into()));
        }
        let psi = m / qdilate::linmat::c(norm, 0.0);
        &psi * psi.adjoint()
    } else {
        m
    };
    if rho.shape() != (d, d) {
        return Err(Failure::Precondition(format!("state has shape {:?}, instrument input dimension is {d}", rho.shape())));
    }
    let herm = hermiticity_residual(&rho);
    if herm > tol {
        return Err(Failure::Precondition(format!("state is not Hermitian (residual {herm:.3e})")));
    }
    let min = HermitianEig::new(&rho, 1e-8)?.min_eigenvalue();
    if min < -tol {
        return Err(Failure::Precondition(format!("state is not positive (min eigenvalue {min:.3e})")));
    }
    let tr = trace(&rho).re;
    if (tr - 1.0).abs() > tol {
        return Err(Failure::Precondition(format!("state has trace {tr}, expected 1")));
    }
    Ok(rho)
}

/// Re-reads a library report against the run tolerance.
fn reverify(report: &qdilate::report::VerificationReport, run: &mut RunReport) {
    for c in &report.checks {
        let tol = c.tolerance.max(run.tolerance);
        run.push(c.name.clone(), c.residual, tol);
    }
}
