//! JSON encodings of matrices, maps, instruments, frames, specs, groups and the
//! objects built from them.
//!
//! Matrices are `{"rows", "cols", "entries"}` with `entries` a flat row-major
//! list of `[re, im]` pairs. Decoding separates malformed documents from
//! well-formed documents that describe an invalid object.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::covariant::{CharacterTable, FiniteGroup, GroupDilation, Irrep, NaimarkDilation, UnitaryRep};
use crate::cpmap::{CpMap, StinespringDilation};
use crate::error::Error;
use crate::frameorbit::{FrameOrbitSpec, TeleportationScheme, FACTOR_ORDER};
use crate::frames::OperatorFrame;
use crate::instrument::{Instrument, InstrumentDilation, Outcome};
use crate::linmat::{c, ComplexMatrix};

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Invalid(#[from] Error),
}

pub type DecodeResult<T> = std::result::Result<T, DecodeError>;

fn malformed<T>(msg: impl Into<String>) -> DecodeResult<T> {
    Err(DecodeError::Malformed(msg.into()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn encode(m: &ComplexMatrix) -> Self {
        let entries = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
            .collect();
        Self { rows: m.nrows(), cols: m.ncols(), entries }
    }

    pub fn decode(&self) -> DecodeResult<ComplexMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return malformed(format!(
                "matrix declares {}x{} but has {} entries",
                self.rows,
                self.cols,
                self.entries.len()
            ));
        }
        if self.entries.iter().flatten().any(|x| !x.is_finite()) {
            return malformed("matrix has non-finite entries");
        }
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.entries[i * self.cols + j];
            c(re, im)
        }))
    }
}

pub fn matrix_to_value(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixJson::encode(m)).expect("matrix encoding")
}

fn matrices_to_value(ms: &[ComplexMatrix]) -> Value {
    Value::Array(ms.iter().map(matrix_to_value).collect())
}

pub fn matrix_from_value(v: &Value) -> DecodeResult<ComplexMatrix> {
    MatrixJson::deserialize(v)?.decode()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CpMapJson {
    Kraus { d_in: Option<usize>, d_out: Option<usize>, kraus: Vec<MatrixJson> },
    Choi { d_in: Option<usize>, d_out: Option<usize>, choi: MatrixJson },
}

pub fn cpmap_to_value(map: &CpMap) -> Value {
    json!({
        "d_in": map.d_in(),
        "d_out": map.d_out(),
        "kraus": matrices_to_value(map.kraus()),
    })
}

/// A Choi-only encoding without dimensions is read as a map on `C^d` with
/// `d = sqrt(rows)`.
pub fn cpmap_from_value(v: &Value) -> DecodeResult<CpMap> {
    match CpMapJson::deserialize(v)? {
        CpMapJson::Kraus { d_in, d_out, kraus } => {
            let ops = kraus.iter().map(MatrixJson::decode).collect::<DecodeResult<Vec<_>>>()?;
            if ops.is_empty() {
                let (Some(d_in), Some(d_out)) = (d_in, d_out) else {
                    return malformed("an empty Kraus list needs d_in and d_out");
                };
                return Ok(CpMap::zero(d_in, d_out));
            }
            let map = CpMap::from_kraus(ops)?;
            if d_in.is_some_and(|d| d != map.d_in()) || d_out.is_some_and(|d| d != map.d_out()) {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operators map {}->{}, declared {:?}->{:?}",
                    map.d_in(),
                    map.d_out(),
                    d_in,
                    d_out
                ))
                .into());
            }
            Ok(map)
        }
        CpMapJson::Choi { d_in, d_out, choi } => {
            let r = choi.decode()?;
            if r.nrows() != r.ncols() {
                return malformed("Choi matrix must be square");
            }
            let n = r.nrows();
            let (d_in, d_out) = match (d_in, d_out) {
                (Some(a), Some(b)) => (a, b),
                (Some(a), None) if a > 0 && n % a == 0 => (a, n / a),
                (None, Some(b)) if b > 0 && n % b == 0 => (n / b, b),
                (None, None) => {
                    let d = (n as f64).sqrt().round() as usize;
                    if d * d != n {
                        return malformed(format!("cannot infer dimensions of a {n}x{n} Choi matrix"));
                    }
                    (d, d)
                }
                _ => return malformed("declared dimensions do not divide the Choi matrix size"),
            };
            Ok(CpMap::from_choi(r, d_in, d_out)?)
        }
    }
}

#[derive(Deserialize)]
struct OutcomeJson {
    label: Option<String>,
    weight: f64,
    density: Value,
}

#[derive(Deserialize)]
struct InstrumentJson {
    d_in: usize,
    d_out: usize,
    outcomes: Vec<OutcomeJson>,
}

pub fn instrument_to_value(instr: &Instrument) -> Value {
    json!({
        "d_in": instr.d_in(),
        "d_out": instr.d_out(),
        "outcomes": instr.outcomes().iter().map(|o| json!({
            "label": o.label,
            "weight": o.weight,
            "density": cpmap_to_value(&o.density),
        })).collect::<Vec<_>>(),
    })
}

/// Decodes and validates normalization at `tol`.
pub fn instrument_from_value(v: &Value, tol: f64) -> DecodeResult<Instrument> {
    let raw = InstrumentJson::deserialize(v)?;
    let outcomes = raw
        .outcomes
        .into_iter()
        .enumerate()
        .map(|(i, o)| {
            let density = cpmap_from_value(&o.density)?;
            Ok(Outcome::new(o.label.unwrap_or_else(|| i.to_string()), o.weight, density))
        })
        .collect::<DecodeResult<Vec<_>>>()?;
    Ok(Instrument::with_tol(raw.d_in, raw.d_out, outcomes, tol)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FrameJson {
    Keyword(String),
    Named { name: String, d: Option<usize> },
    Explicit { d: Option<usize>, members: Vec<MemberJson> },
}

#[derive(Deserialize)]
struct MemberJson {
    weight: f64,
    op: MatrixJson,
}

pub fn frame_to_value(frame: &OperatorFrame) -> Value {
    json!({
        "d": frame.d(),
        "members": frame.members().iter().map(|(w, a)| json!({
            "weight": w,
            "op": matrix_to_value(a),
        })).collect::<Vec<_>>(),
    })
}

/// Accepts `"pauli"`, `{"name": "weyl-heisenberg", "d": 3}` or an explicit member list.
pub fn frame_from_value(v: &Value) -> DecodeResult<OperatorFrame> {
    match FrameJson::deserialize(v)? {
        FrameJson::Keyword(name) => {
            if name == "pauli" {
                Ok(OperatorFrame::pauli())
            } else {
                malformed(format!("frame keyword '{name}' needs a dimension; use {{\"name\", \"d\"}}"))
            }
        }
        FrameJson::Named { name, d } => Ok(OperatorFrame::named(&name, d.unwrap_or(2))?),
        FrameJson::Explicit { d, members } => {
            let members = members
                .iter()
                .map(|m| Ok((m.weight, m.op.decode()?)))
                .collect::<DecodeResult<Vec<_>>>()?;
            let frame = OperatorFrame::new(members)?;
            if d.is_some_and(|d| d != frame.d()) {
                return Err(Error::DimensionMismatch(format!("frame declares d={d:?}, members act on {}", frame.d())).into());
            }
            Ok(frame)
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ConditionalJson {
    Keyword(String),
    Channels(Vec<Value>),
}

#[derive(Deserialize)]
struct SpecJson {
    frame: Value,
    seed_map: Value,
    conditional_channels: Option<ConditionalJson>,
}

/// `conditional_channels` may be a list, `"unitary-from-frame"`, `"identity"`, or absent (identity).
pub fn spec_from_value(v: &Value) -> DecodeResult<FrameOrbitSpec> {
    let raw = SpecJson::deserialize(v)?;
    let frame = frame_from_value(&raw.frame)?;
    let seed = cpmap_from_value(&raw.seed_map)?;
    match raw.conditional_channels {
        None => Ok(FrameOrbitSpec::new(frame, seed, None)?),
        Some(ConditionalJson::Keyword(k)) if k == "identity" => Ok(FrameOrbitSpec::new(frame, seed, None)?),
        Some(ConditionalJson::Keyword(k)) if k == "unitary-from-frame" => {
            Ok(FrameOrbitSpec::with_frame_unitaries(frame, seed)?)
        }
        Some(ConditionalJson::Keyword(k)) => malformed(format!("unknown conditional_channels keyword '{k}'")),
        Some(ConditionalJson::Channels(list)) => {
            let b = list.iter().map(cpmap_from_value).collect::<DecodeResult<Vec<_>>>()?;
            Ok(FrameOrbitSpec::new(frame, seed, Some(b))?)
        }
    }
}

pub fn spec_to_value(spec: &FrameOrbitSpec) -> Value {
    json!({
        "frame": frame_to_value(spec.frame()),
        "seed_map": cpmap_to_value(spec.seed()),
        "conditional_channels": spec.conditional().iter().map(cpmap_to_value).collect::<Vec<_>>(),
    })
}

pub fn stinespring_to_value(dil: &StinespringDilation) -> Value {
    json!({
        "ancilla_dim": dil.ancilla_dim,
        "v": matrix_to_value(&dil.v),
        "ancilla_embedding": dil.ancilla_embedding.as_ref().map(matrix_to_value),
    })
}

pub fn instrument_dilation_to_value(dil: &InstrumentDilation) -> Value {
    json!({
        "ancilla_dim": dil.ancilla_dim,
        "v": matrix_to_value(&dil.v),
        "q": matrices_to_value(&dil.q),
        "labels": dil.labels,
        "ancilla_embedding": dil.ancilla_embedding.as_ref().map(matrix_to_value),
    })
}

pub fn scheme_to_value(s: &TeleportationScheme) -> Value {
    json!({
        "kind": s.kind,
        "factor_order": FACTOR_ORDER,
        "bob_dim": s.bob_dim,
        "alice_dim": s.alice_dim,
        "d_in": s.d_in,
        "resource": matrix_to_value(&s.resource),
        "weights": s.weights,
        "povm": matrices_to_value(&s.effects),
        "effect_sum_target": matrix_to_value(&s.effect_sum_target),
        "conditional_channels": s.conditional.iter().map(cpmap_to_value).collect::<Vec<_>>(),
    })
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    order: usize,
    cayley: Vec<Vec<usize>>,
}

pub fn group_to_value(g: &FiniteGroup) -> Value {
    serde_json::to_value(GroupJson { order: g.order(), cayley: g.cayley().to_vec() }).expect("group encoding")
}

pub fn group_from_value(v: &Value) -> DecodeResult<FiniteGroup> {
    let raw = GroupJson::deserialize(v)?;
    if raw.cayley.len() != raw.order {
        return malformed(format!("group of order {} has {} table rows", raw.order, raw.cayley.len()));
    }
    Ok(FiniteGroup::from_cayley(raw.cayley)?)
}

#[derive(Deserialize)]
struct RepJson {
    group: Value,
    matrices: Vec<MatrixJson>,
    #[serde(default)]
    projective: bool,
}

pub fn rep_to_value(rep: &UnitaryRep) -> Value {
    json!({
        "group": group_to_value(rep.group()),
        "matrices": matrices_to_value(rep.matrices()),
        "projective": rep.is_projective(),
    })
}

pub fn rep_from_value(v: &Value) -> DecodeResult<UnitaryRep> {
    let raw = RepJson::deserialize(v)?;
    let group = group_from_value(&raw.group)?;
    let mats = raw.matrices.iter().map(MatrixJson::decode).collect::<DecodeResult<Vec<_>>>()?;
    Ok(UnitaryRep::new(group, mats, raw.projective)?)
}

#[derive(Serialize, Deserialize)]
struct IrrepJson {
    label: String,
    dim: usize,
    values: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct CharactersJson {
    irreps: Vec<IrrepJson>,
}

pub fn characters_to_value(t: &CharacterTable) -> Value {
    let irreps = t
        .irreps()
        .iter()
        .map(|ir| IrrepJson {
            label: ir.label.clone(),
            dim: ir.dim,
            values: ir.values.iter().map(|z| [z.re, z.im]).collect(),
        })
        .collect();
    serde_json::to_value(CharactersJson { irreps }).expect("character encoding")
}

pub fn characters_from_value(v: &Value, group: &FiniteGroup) -> DecodeResult<CharacterTable> {
    let raw = CharactersJson::deserialize(v)?;
    let irreps = raw
        .irreps
        .into_iter()
        .map(|ir| Irrep { label: ir.label, dim: ir.dim, values: ir.values.iter().map(|[a, b]| c(*a, *b)).collect() })
        .collect();
    Ok(CharacterTable::new(group, irreps)?)
}

pub fn group_dilation_to_value(dil: &GroupDilation) -> Value {
    json!({
        "kraus_count": dil.kraus_count,
        "eta_dim": dil.decomposition.eta_dim(),
        "v": matrix_to_value(&dil.v),
        "eta": matrices_to_value(&dil.eta),
        "report": dil.report,
    })
}

pub fn naimark_to_value(n: &NaimarkDilation) -> Value {
    json!({ "y": matrix_to_value(&n.y), "report": n.report })
}
