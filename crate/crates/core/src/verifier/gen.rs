//! Random inputs for the property checks.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::linalg::{self, c64, CMatrix, CVector};
use crate::models::{self, Event, Model, ModelKind};
use crate::observables::{self, PrimitiveObservable};
use crate::states::{self, State};

/// Uniform rank in `0..=size`, so 0 and 𝟙 come up regularly.
pub fn event<R: Rng>(rng: &mut R, model: Model) -> Event {
    let rank = rng.random_range(0..=model.size());
    models::random_event_with(model, rank, rng).expect("rank in range")
}

pub fn nonzero_event<R: Rng>(rng: &mut R, model: Model) -> Event {
    let rank = rng.random_range(1..=model.size());
    models::random_event_with(model, rank, rng).expect("rank in range")
}

pub fn rank_one_event<R: Rng>(rng: &mut R, model: Model) -> Event {
    models::random_event_with(model, 1, rng).expect("rank in range")
}

/// `k` mutually orthogonal events from one random frame; some may be 0.
pub fn orthogonal_family<R: Rng>(rng: &mut R, model: Model, k: usize) -> Vec<Event> {
    let n = model.size();
    // label k leaves a point uncovered
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..=k)).collect();
    match model.kind() {
        ModelKind::Classical => (0..k)
            .map(|b| {
                let indices = (0..n).filter(|&i| labels[i] == b);
                Event::from_indices(model, indices).expect("indices in range")
            })
            .collect(),
        ModelKind::Quantum => {
            let u = linalg::haar_unitary(rng, n);
            (0..k)
                .map(|b| {
                    let vectors: Vec<CVector> =
                        (0..n).filter(|&i| labels[i] == b).map(|i| u.column(i).into_owned()).collect();
                    Event::from_span(model, &vectors).expect("dimensions match")
                })
                .collect()
        }
    }
}

/// Random `F ≺ E`.
pub fn sub_event<R: Rng>(rng: &mut R, e: &Event) -> Event {
    let model = e.model();
    match e.indices() {
        Some(members) => {
            let keep = members.into_iter().filter(|_| rng.random_bool(0.5));
            Event::from_indices(model, keep).expect("subset of an event")
        }
        None => {
            let (_, vectors) = linalg::eigh(e.projection().expect("quantum event"));
            let n = model.size();
            let r = e.rank();
            if r == 0 {
                return model.zero();
            }
            let range = vectors.columns(n - r, r).into_owned();
            let rotated = range * linalg::haar_unitary(rng, r);
            let k = rng.random_range(0..=r);
            let cols: Vec<CVector> = (0..k).map(|j| rotated.column(j).into_owned()).collect();
            Event::from_span(model, &cols).expect("dimensions match")
        }
    }
}

/// Mixed states most of the time, pure states (point masses) otherwise.
pub fn state<R: Rng>(rng: &mut R, model: Model) -> State {
    if rng.random_bool(0.2) {
        match model.kind() {
            ModelKind::Classical => {
                State::point_mass(model, rng.random_range(0..model.size())).expect("point in range")
            }
            ModelKind::Quantum => {
                let g = linalg::gaussian_matrix(rng, model.size(), 1);
                State::pure(model, &g.column(0).into_owned()).expect("nonzero vector")
            }
        }
    } else {
        states::random_state_with(model, rng)
    }
}

pub fn mixed_state<R: Rng>(rng: &mut R, model: Model) -> State {
    states::random_state_with(model, rng)
}

pub fn observable<R: Rng>(rng: &mut R, model: Model, bound: f64) -> PrimitiveObservable {
    observables::random_observable_with(model, bound, rng)
}

/// Splits one eigen-event of `x` into two orthogonal parts, giving a
/// non-canonical linear combination of indicators equal to `x`.
pub fn refine<R: Rng>(rng: &mut R, x: &PrimitiveObservable) -> Vec<(f64, Event)> {
    let mut terms: Vec<(f64, Event)> = x.terms().iter().map(|t| (t.value, t.event.clone())).collect();
    let candidates: Vec<usize> = (0..terms.len()).filter(|&j| terms[j].1.rank() >= 2).collect();
    if let Some(&j) = candidates.choose(rng) {
        let (value, event) = terms[j].clone();
        let part = loop {
            let part = sub_event(rng, &event);
            if !part.is_zero() && part.rank() < event.rank() {
                break part;
            }
        };
        let rest = models::difference(&part, &event).expect("same model").expect("part precedes event");
        terms[j] = (value, part);
        terms.push((value, rest));
    }
    terms
}

/// Random real function sampled through a small family: polynomials,
/// trigonometric and piecewise terms.
pub fn function<R: Rng>(rng: &mut R) -> impl Fn(f64) -> f64 + Clone {
    let a: f64 = rng.random_range(-1.0..1.0);
    let b: f64 = rng.random_range(-1.0..1.0);
    let c: f64 = rng.random_range(-1.0..1.0);
    let w: f64 = rng.random_range(0.5..3.0);
    let cut: f64 = rng.random_range(-1.0..1.0);
    move |t: f64| a + b * t + c * (w * t).sin() + if t > cut { 0.5 } else { 0.0 }
}

pub fn basis_projection(model: Model, i: usize) -> Event {
    let mut v = CVector::zeros(model.size());
    v[i] = c64(1.0, 0.0);
    Event::from_span(model, &[v]).expect("dimensions match")
}

/// Projection onto `(e_0 + e_1)/√2`.
pub fn diagonal_projection(model: Model) -> Event {
    let mut v = CVector::zeros(model.size());
    v[0] = c64(1.0, 0.0);
    v[1] = c64(1.0, 0.0);
    Event::from_span(model, &[v]).expect("dimensions match")
}

pub fn symmetrized(a: &CMatrix, b: &CMatrix) -> CMatrix {
    (a * b + b * a).scale(0.5)
}

/// A pure state (point mass) supported in the nonzero event `e`.
pub fn state_on(e: &Event) -> crate::Result<State> {
    let model = e.model();
    match e.indices() {
        Some(members) => State::point_mass(model, members[0]),
        None => {
            let (_, vectors) = linalg::eigh(e.projection().expect("quantum event"));
            State::pure(model, &vectors.column(model.size() - 1).into_owned())
        }
    }
}
