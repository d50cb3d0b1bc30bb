//! JSON encoding of models, events, states and observables.
//!
//! * classical events: sorted lists of 1-based sample point labels,
//! * quantum matrices: lists of rows, each entry an `[re, im]` pair,
//! * vectors: lists of `[re, im]` pairs,
//! * classical states: probability vectors,
//! * observables: lists of `{"value": t, "event": <event>}` records.
//!
//! Decoders also accept the authoring shorthands `{"span": [vectors]}` for
//! events and `{"pure": vector}` for states.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, CVector};
use crate::models::{Event, Model, ModelKind};
use crate::observables::PrimitiveObservable;
use crate::states::State;

/// Allowed deviation of an encoded probability vector's sum from 1.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn model_to_json(model: &Model) -> Value {
    json!({
        "kind": model.kind(),
        "size": model.size(),
        "tolerance": model.tolerance(),
    })
}

pub fn model_from_json(v: &Value) -> Result<Model> {
    let obj = v.as_object().ok_or_else(|| parse_err("model must be an object"))?;
    let kind: ModelKind = serde_json::from_value(obj.get("kind").cloned().unwrap_or(Value::Null))
        .map_err(|e| parse_err(format!("model.kind: {e}")))?;
    let size = obj
        .get("size")
        .and_then(Value::as_u64)
        .ok_or_else(|| parse_err("model.size must be a positive integer"))? as usize;
    let tolerance = match (kind, obj.get("tolerance")) {
        (_, Some(t)) => t.as_f64().ok_or_else(|| parse_err("model.tolerance must be a number"))?,
        (ModelKind::Classical, None) => 0.0,
        (ModelKind::Quantum, None) => Model::DEFAULT_TOLERANCE,
    };
    Model::new(kind, size, tolerance)
}

fn complex_from_json(v: &Value) -> Result<nalgebra::Complex<f64>> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(c64(re, im)),
            _ => Err(parse_err("complex entries must be [re, im] number pairs")),
        },
        _ => Err(parse_err("complex entries must be [re, im] number pairs")),
    }
}

pub fn matrix_to_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value, dim: usize) -> Result<CMatrix> {
    let rows = v.as_array().ok_or_else(|| parse_err("matrix must be a list of rows"))?;
    if rows.len() != dim {
        return Err(parse_err(format!("matrix has {} rows, expected {dim}", rows.len())));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| parse_err("matrix rows must be lists"))?;
        if row.len() != dim {
            return Err(parse_err(format!("matrix row {i} has {} entries, expected {dim}", row.len())));
        }
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = complex_from_json(z)?;
        }
    }
    Ok(m)
}

pub fn vector_to_json(v: &CVector) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

pub fn vector_from_json(v: &Value, dim: usize) -> Result<CVector> {
    let entries = v.as_array().ok_or_else(|| parse_err("vector must be a list"))?;
    if entries.len() != dim {
        return Err(parse_err(format!("vector has {} entries, expected {dim}", entries.len())));
    }
    let parsed = entries.iter().map(complex_from_json).collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(parsed))
}

pub fn event_to_json(e: &Event) -> Value {
    match e.indices() {
        Some(indices) => Value::Array(indices.into_iter().map(|i| json!(i + 1)).collect()),
        None => matrix_to_json(e.projection().expect("quantum event")),
    }
}

pub fn event_from_json(model: Model, v: &Value) -> Result<Event> {
    match model.kind() {
        ModelKind::Classical => {
            let labels = v
                .as_array()
                .ok_or_else(|| parse_err("classical events are lists of sample point labels"))?;
            let mut indices = Vec::with_capacity(labels.len());
            for l in labels {
                let label = l
                    .as_u64()
                    .filter(|l| *l >= 1)
                    .ok_or_else(|| parse_err("sample point labels are integers starting at 1"))?;
                indices.push(label as usize - 1);
            }
            Event::from_indices(model, indices)
        }
        ModelKind::Quantum => {
            if let Some(span) = v.get("span") {
                let vectors = span
                    .as_array()
                    .ok_or_else(|| parse_err("span must be a list of vectors"))?
                    .iter()
                    .map(|x| vector_from_json(x, model.size()))
                    .collect::<Result<Vec<_>>>()?;
                Event::from_span(model, &vectors)
            } else {
                let m = v.get("matrix").unwrap_or(v);
                Event::from_projection(model, matrix_from_json(m, model.size())?)
            }
        }
    }
}

pub fn state_to_json(s: &State) -> Value {
    match s.probabilities() {
        Some(p) => json!(p),
        None => matrix_to_json(s.density().expect("quantum state")),
    }
}

pub fn state_from_json(model: Model, v: &Value) -> Result<State> {
    match model.kind() {
        ModelKind::Classical => {
            let p = v
                .as_array()
                .ok_or_else(|| parse_err("classical states are probability vectors"))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| parse_err("probabilities must be numbers")))
                .collect::<Result<Vec<_>>>()?;
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
                return Err(Error::InvariantViolation(format!("probabilities sum to {total}, expected 1")));
            }
            State::from_probabilities(model, p)
        }
        ModelKind::Quantum => {
            if let Some(pure) = v.get("pure") {
                State::pure(model, &vector_from_json(pure, model.size())?)
            } else {
                let m = v.get("density").unwrap_or(v);
                State::from_density(model, matrix_from_json(m, model.size())?)
            }
        }
    }
}

pub fn observable_to_json(x: &PrimitiveObservable) -> Value {
    Value::Array(
        x.terms()
            .iter()
            .map(|t| {
                let mut m = Map::new();
                m.insert("value".into(), json!(t.value));
                m.insert("event".into(), event_to_json(&t.event));
                Value::Object(m)
            })
            .collect(),
    )
}

/// Decodes an observable. Event fields may be inline events or names,
/// which are looked up through `resolve`.
pub fn observable_from_json<F>(model: Model, v: &Value, resolve: F) -> Result<PrimitiveObservable>
where
    F: Fn(&str) -> Result<Event>,
{
    let records = v.as_array().ok_or_else(|| parse_err("observables are lists of {value, event} records"))?;
    let mut terms = Vec::with_capacity(records.len());
    for r in records {
        let value = r
            .get("value")
            .and_then(Value::as_f64)
            .ok_or_else(|| parse_err("observable record needs a numeric `value`"))?;
        let event = match r.get("event") {
            Some(Value::String(name)) => resolve(name)?,
            Some(inline) => event_from_json(model, inline)?,
            None => return Err(parse_err("observable record needs an `event`")),
        };
        terms.push((value, event));
    }
    PrimitiveObservable::from_terms(model, terms)
}

/// Decodes an observable whose events are all inline.
pub fn observable_from_json_inline(model: Model, v: &Value) -> Result<PrimitiveObservable> {
    observable_from_json(model, v, |name| Err(parse_err(format!("unexpected event reference `{name}`"))))
}
