//! Event spaces: the Boolean algebra of subsets of a finite sample space and
//! the projection lattice of a `d`-dimensional complex Hilbert space, both
//! presented through orthogonality, orthogonal sums and complements.

use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Classical,
    Quantum,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Classical => f.write_str("classical"),
            ModelKind::Quantum => f.write_str("quantum"),
        }
    }
}

/// A concrete event space. Classical models use exact subset arithmetic and
/// carry a tolerance of zero; quantum models compare projections in the
/// spectral norm up to `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    kind: ModelKind,
    size: usize,
    tolerance: f64,
}

impl Model {
    pub const DEFAULT_TOLERANCE: f64 = 1e-8;
    pub const MAX_CLASSICAL_SIZE: usize = 64;
    pub const MAX_QUANTUM_DIM: usize = 32;

    pub fn new(kind: ModelKind, size: usize, tolerance: f64) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidModel("size must be at least 1".into()));
        }
        match kind {
            ModelKind::Classical => {
                if size > Self::MAX_CLASSICAL_SIZE {
                    return Err(Error::ModelLimit {
                        kind: "classical",
                        max: Self::MAX_CLASSICAL_SIZE,
                        size,
                    });
                }
                if tolerance != 0.0 {
                    return Err(Error::InvalidModel(
                        "classical models are exact; tolerance must be 0".into(),
                    ));
                }
            }
            ModelKind::Quantum => {
                if size > Self::MAX_QUANTUM_DIM {
                    return Err(Error::ModelLimit {
                        kind: "quantum",
                        max: Self::MAX_QUANTUM_DIM,
                        size,
                    });
                }
                if !(tolerance > 0.0 && tolerance < 1e-4) {
                    return Err(Error::InvalidModel(format!(
                        "quantum tolerance must lie in (0, 1e-4), got {tolerance:e}"
                    )));
                }
            }
        }
        Ok(Model { kind, size, tolerance })
    }

    pub fn classical(size: usize) -> Result<Self> {
        Self::new(ModelKind::Classical, size, 0.0)
    }

    pub fn quantum(dim: usize) -> Result<Self> {
        Self::new(ModelKind::Quantum, dim, Self::DEFAULT_TOLERANCE)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn is_quantum(&self) -> bool {
        self.kind == ModelKind::Quantum
    }

    pub(crate) fn full_mask(&self) -> u64 {
        if self.size == 64 {
            u64::MAX
        } else {
            (1u64 << self.size) - 1
        }
    }

    /// The impossible event 0.
    pub fn zero(&self) -> Event {
        match self.kind {
            ModelKind::Classical => Event::classical(*self, 0),
            ModelKind::Quantum => {
                Event::quantum_unchecked(*self, CMatrix::zeros(self.size, self.size))
            }
        }
    }

    /// The certain event 𝟙.
    pub fn one(&self) -> Event {
        match self.kind {
            ModelKind::Classical => Event::classical(*self, self.full_mask()),
            ModelKind::Quantum => {
                Event::quantum_unchecked(*self, CMatrix::identity(self.size, self.size))
            }
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModelKind::Classical => write!(f, "classical(n={})", self.size),
            ModelKind::Quantum => write!(f, "quantum(d={}, tol={:e})", self.size, self.tolerance),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum EventPayload {
    /// Bit `i` set means sample point `i` belongs to the event.
    Classical(u64),
    /// Hermitian idempotent matrix.
    Quantum(CMatrix),
}

/// An element of the event space of a [`Model`]. Immutable once built.
#[derive(Clone, Debug)]
pub struct Event {
    model: Model,
    payload: EventPayload,
}

impl Event {
    pub(crate) fn classical(model: Model, bits: u64) -> Self {
        debug_assert_eq!(bits & !model.full_mask(), 0);
        Event { model, payload: EventPayload::Classical(bits) }
    }

    pub(crate) fn quantum_unchecked(model: Model, projection: CMatrix) -> Self {
        Event { model, payload: EventPayload::Quantum(projection) }
    }

    /// Classical event from zero-based sample point indices.
    pub fn from_indices(model: Model, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        if model.is_quantum() {
            return Err(Error::ModelMismatch);
        }
        let mut bits = 0u64;
        for i in indices {
            if i >= model.size {
                return Err(Error::InvariantViolation(format!(
                    "sample point {i} outside 0..{}",
                    model.size
                )));
            }
            bits |= 1 << i;
        }
        Ok(Event::classical(model, bits))
    }

    /// Classical event from a bitset.
    pub fn from_bits(model: Model, bits: u64) -> Result<Self> {
        if model.is_quantum() {
            return Err(Error::ModelMismatch);
        }
        if bits & !model.full_mask() != 0 {
            return Err(Error::InvariantViolation(format!(
                "bitset {bits:#x} has points outside the sample space"
            )));
        }
        Ok(Event::classical(model, bits))
    }

    /// Quantum event from a projection matrix. The matrix is Hermitized once
    /// here; both the Hermiticity defect and the idempotency defect must be
    /// within the model tolerance.
    pub fn from_projection(model: Model, matrix: CMatrix) -> Result<Self> {
        if !model.is_quantum() {
            return Err(Error::ModelMismatch);
        }
        let d = model.size;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvariantViolation(format!(
                "expected a {d}x{d} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvariantViolation("matrix has non-finite entries".into()));
        }
        let skew = linalg::spectral_norm(&(&matrix - matrix.adjoint()));
        if skew > model.tolerance {
            return Err(Error::InvariantViolation(format!(
                "matrix is not Hermitian: |P - P*| = {skew:e}"
            )));
        }
        let p = linalg::hermitize(&matrix);
        let defect = linalg::hermitian_norm(&(&p * &p - &p));
        if defect > model.tolerance {
            return Err(Error::InvariantViolation(format!(
                "matrix is not idempotent: |P^2 - P| = {defect:e}"
            )));
        }
        Ok(Event::quantum_unchecked(model, p))
    }

    /// Quantum event projecting onto the span of `vectors`.
    pub fn from_span(model: Model, vectors: &[CVector]) -> Result<Self> {
        if !model.is_quantum() {
            return Err(Error::ModelMismatch);
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != model.size) {
            return Err(Error::InvariantViolation(format!(
                "spanning vector has length {}, expected {}",
                v.len(),
                model.size
            )));
        }
        let basis = linalg::orthonormalize(vectors, 1e-10);
        let mut p = CMatrix::zeros(model.size, model.size);
        for b in &basis {
            p += b * b.adjoint();
        }
        Ok(Event::quantum_unchecked(model, p))
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn bits(&self) -> Option<u64> {
        match &self.payload {
            EventPayload::Classical(bits) => Some(*bits),
            EventPayload::Quantum(_) => None,
        }
    }

    /// Zero-based member indices of a classical event.
    pub fn indices(&self) -> Option<Vec<usize>> {
        self.bits()
            .map(|bits| (0..self.model.size).filter(|i| bits >> i & 1 == 1).collect())
    }

    pub fn projection(&self) -> Option<&CMatrix> {
        match &self.payload {
            EventPayload::Quantum(p) => Some(p),
            EventPayload::Classical(_) => None,
        }
    }

    pub(crate) fn payload(&self) -> &EventPayload {
        &self.payload
    }

    /// Cardinality (classical) or `round(tr P)` (quantum).
    pub fn rank(&self) -> usize {
        match &self.payload {
            EventPayload::Classical(bits) => bits.count_ones() as usize,
            EventPayload::Quantum(p) => linalg::trace_re(p).round().max(0.0) as usize,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.payload {
            EventPayload::Classical(bits) => *bits == 0,
            EventPayload::Quantum(p) => linalg::trace_re(p) < 0.5,
        }
    }

    /// Dense matrix of the event: the projection, or the diagonal indicator
    /// matrix of a subset.
    pub fn to_matrix(&self) -> CMatrix {
        match &self.payload {
            EventPayload::Quantum(p) => p.clone(),
            EventPayload::Classical(bits) => {
                let n = self.model.size;
                CMatrix::from_fn(n, n, |i, j| {
                    let on = i == j && bits >> i & 1 == 1;
                    linalg::c64(if on { 1.0 } else { 0.0 }, 0.0)
                })
            }
        }
    }
}

fn same_model(e: &Event, f: &Event) -> Result<()> {
    if e.model != f.model {
        return Err(Error::ModelMismatch);
    }
    Ok(())
}

/// `|PQ|` for quantum events, 0 or 1 for classical ones.
pub fn overlap(e: &Event, f: &Event) -> Result<f64> {
    same_model(e, f)?;
    Ok(match (&e.payload, &f.payload) {
        (EventPayload::Classical(a), EventPayload::Classical(b)) => {
            if a & b == 0 {
                0.0
            } else {
                1.0
            }
        }
        (EventPayload::Quantum(p), EventPayload::Quantum(q)) => linalg::spectral_norm(&(p * q)),
        _ => unreachable!("payload kind follows the model"),
    })
}

pub fn is_orthogonal(e: &Event, f: &Event) -> Result<bool> {
    Ok(overlap(e, f)? <= e.model.tolerance)
}

/// Orthogonal sum `E + F`, defined only for `E ⊥ F`.
pub fn ortho_sum(e: &Event, f: &Event) -> Result<Event> {
    let overlap = overlap(e, f)?;
    if overlap > e.model.tolerance {
        return Err(Error::NotOrthogonal { overlap });
    }
    Ok(sum_unchecked(e, f))
}

pub(crate) fn sum_unchecked(e: &Event, f: &Event) -> Event {
    match (&e.payload, &f.payload) {
        (EventPayload::Classical(a), EventPayload::Classical(b)) => Event::classical(e.model, a | b),
        (EventPayload::Quantum(p), EventPayload::Quantum(q)) => {
            Event::quantum_unchecked(e.model, linalg::hermitize(&(p + q)))
        }
        _ => unreachable!("payload kind follows the model"),
    }
}

/// The unique `E′` with `E ⊥ E′` and `E + E′ = 𝟙`.
pub fn complement(e: &Event) -> Event {
    match &e.payload {
        EventPayload::Classical(bits) => Event::classical(e.model, !bits & e.model.full_mask()),
        EventPayload::Quantum(p) => {
            let d = e.model.size;
            Event::quantum_unchecked(e.model, CMatrix::identity(d, d) - p)
        }
    }
}

/// `E ≺ F`, i.e. `E ⊥ F′`.
pub fn precedes(e: &Event, f: &Event) -> Result<bool> {
    is_orthogonal(e, &complement(f))
}

/// The unique `D` with `E ⊥ D` and `E + D = F`, when `E ≺ F`.
pub fn difference(e: &Event, f: &Event) -> Result<Option<Event>> {
    if !precedes(e, f)? {
        return Ok(None);
    }
    Ok(Some(match (&e.payload, &f.payload) {
        (EventPayload::Classical(a), EventPayload::Classical(b)) => Event::classical(e.model, b & !a),
        (EventPayload::Quantum(p), EventPayload::Quantum(q)) => {
            Event::quantum_unchecked(e.model, linalg::hermitize(&(q - p)))
        }
        _ => unreachable!("payload kind follows the model"),
    }))
}

/// Norm distance between two events (0/1 for classical events).
pub fn event_distance(e: &Event, f: &Event) -> Result<f64> {
    same_model(e, f)?;
    Ok(match (&e.payload, &f.payload) {
        (EventPayload::Classical(a), EventPayload::Classical(b)) => {
            if a == b {
                0.0
            } else {
                1.0
            }
        }
        (EventPayload::Quantum(p), EventPayload::Quantum(q)) => linalg::hermitian_norm(&(p - q)),
        _ => unreachable!("payload kind follows the model"),
    })
}

pub fn events_equal(e: &Event, f: &Event) -> Result<bool> {
    Ok(event_distance(e, f)? <= e.model.tolerance)
}

/// Seeded random event of the given rank: a uniform subset of that
/// cardinality, or the projection onto the first `rank` columns of a Haar
/// unitary.
pub fn random_event(model: Model, rank: usize, seed: u64) -> Result<Event> {
    random_event_with(model, rank, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_event_with<R: Rng + ?Sized>(model: Model, rank: usize, rng: &mut R) -> Result<Event> {
    if rank > model.size {
        return Err(Error::RankOutOfRange { rank, size: model.size });
    }
    Ok(match model.kind {
        ModelKind::Classical => {
            let bits = index::sample(rng, model.size, rank)
                .iter()
                .fold(0u64, |acc, i| acc | 1 << i);
            Event::classical(model, bits)
        }
        ModelKind::Quantum => {
            let u = linalg::haar_unitary(rng, model.size);
            Event::quantum_unchecked(model, linalg::projector_from_columns(&u, 0..rank))
        }
    })
}
