//! Bounded real observables with finite spectrum.
//!
//! An observable is stored in canonical spectral form: distinct values in
//! ascending order, each attached to a nonzero event, the events mutually
//! orthogonal and summing to 𝟙. Arithmetic that cannot stay inside one
//! spectral family (sums, products) goes through the realization of the
//! observable as a value function (classical) or a Hermitian operator
//! (quantum) and is brought back to spectral form by clustering.

mod borel;

pub use borel::{BorelSet, Interval};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMatrix};
use crate::models::{self, Event, EventPayload, Model, ModelKind};
use crate::states::{self, State};

/// One value of the spectrum together with its eigen-event.
#[derive(Clone, Debug)]
pub struct SpectralTerm {
    pub value: f64,
    pub event: Event,
}

#[derive(Clone, Debug)]
pub struct PrimitiveObservable {
    model: Model,
    terms: Vec<SpectralTerm>,
}

/// Law of an observable under a state: `(value, probability)` atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub atoms: Vec<(f64, f64)>,
}

impl Distribution {
    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|(_, p)| p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(t, p)| t * p).sum()
    }
}

/// Eigenvalues closer than this are merged when a sum or product is
/// re-expressed in spectral form.
pub fn cluster_threshold(kind: ModelKind, scale: f64) -> f64 {
    match kind {
        ModelKind::Quantum => f64::max(1e-7, 1e-9 * scale),
        ModelKind::Classical => value_merge_threshold(scale),
    }
}

/// Values of `f(X)` closer than this are merged.
pub fn value_merge_threshold(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

/// Concrete representation used for linear arithmetic.
#[derive(Clone, Debug)]
pub(crate) enum Realization {
    Values(Vec<f64>),
    Operator(CMatrix),
}

impl Realization {
    pub(crate) fn zero(model: Model) -> Self {
        let n = model.size();
        match model.kind() {
            ModelKind::Classical => Realization::Values(vec![0.0; n]),
            ModelKind::Quantum => Realization::Operator(CMatrix::zeros(n, n)),
        }
    }

    pub(crate) fn of_event(e: &Event) -> Self {
        match e.payload() {
            EventPayload::Classical(bits) => Realization::Values(
                (0..e.model().size())
                    .map(|i| if bits >> i & 1 == 1 { 1.0 } else { 0.0 })
                    .collect(),
            ),
            EventPayload::Quantum(p) => Realization::Operator(p.clone()),
        }
    }

    /// `self += s · other`
    pub(crate) fn axpy(&mut self, s: f64, other: &Realization) {
        match (self, other) {
            (Realization::Values(a), Realization::Values(b)) => {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += s * y)
            }
            (Realization::Operator(a), Realization::Operator(b)) => *a += b.scale(s),
            _ => unreachable!("realizations of one model share a kind"),
        }
    }

    pub(crate) fn scaled(mut self, s: f64) -> Self {
        match &mut self {
            Realization::Values(a) => a.iter_mut().for_each(|x| *x *= s),
            Realization::Operator(a) => *a *= c64(s, 0.0),
        }
        self
    }

    pub(crate) fn norm(&self) -> f64 {
        match self {
            Realization::Values(a) => a.iter().fold(0.0, |m, x| f64::max(m, x.abs())),
            Realization::Operator(a) => linalg::hermitian_norm(a),
        }
    }

    /// Canonical spectral form; values within `threshold` are merged into
    /// their rank-weighted mean.
    pub(crate) fn into_observable(self, model: Model, threshold: f64) -> PrimitiveObservable {
        let terms = match self {
            Realization::Values(values) => {
                let mut order: Vec<usize> = (0..values.len()).collect();
                order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
                let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
                linalg::cluster_sorted(&sorted, threshold)
                    .into_iter()
                    .map(|range| {
                        let value = mean(&sorted[range.clone()]);
                        let bits = order[range].iter().fold(0u64, |acc, i| acc | 1 << i);
                        SpectralTerm { value, event: Event::classical(model, bits) }
                    })
                    .collect()
            }
            Realization::Operator(a) => {
                let (values, vectors) = linalg::eigh(&a);
                linalg::cluster_sorted(&values, threshold)
                    .into_iter()
                    .map(|range| SpectralTerm {
                        value: mean(&values[range.clone()]),
                        event: Event::quantum_unchecked(
                            model,
                            linalg::projector_from_columns(&vectors, range),
                        ),
                    })
                    .collect()
            }
        };
        PrimitiveObservable { model, terms }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

impl PrimitiveObservable {
    /// Builds `Σ t_j χ_{E_j}` from mutually orthogonal events. Zero events
    /// are dropped, equal values merged, and the uncovered remainder
    /// `(Σ E_j)′` is attached to the value 0.
    pub fn from_terms(model: Model, terms: Vec<(f64, Event)>) -> Result<Self> {
        let mut kept: Vec<SpectralTerm> = Vec::with_capacity(terms.len() + 1);
        for (value, event) in terms {
            if event.model() != model {
                return Err(Error::ModelMismatch);
            }
            if !value.is_finite() {
                return Err(Error::InvariantViolation(format!("spectral value {value} is not finite")));
            }
            if event.is_zero() {
                continue;
            }
            for other in &kept {
                let overlap = models::overlap(&other.event, &event)?;
                if overlap > model.tolerance() {
                    return Err(Error::NotOrthogonal { overlap });
                }
            }
            kept.push(SpectralTerm { value, event });
        }
        let covered = kept
            .iter()
            .fold(model.zero(), |acc, t| models::sum_unchecked(&acc, &t.event));
        let rest = models::complement(&covered);
        if !rest.is_zero() {
            kept.push(SpectralTerm { value: 0.0, event: rest });
        }
        let scale = kept.iter().fold(0.0, |m, t| f64::max(m, t.value.abs()));
        Ok(Self::merge_values(model, kept, value_merge_threshold(scale)))
    }

    fn merge_values(model: Model, mut terms: Vec<SpectralTerm>, threshold: f64) -> Self {
        terms.sort_by(|a, b| a.value.total_cmp(&b.value));
        let values: Vec<f64> = terms.iter().map(|t| t.value).collect();
        let clusters = linalg::cluster_sorted(&values, threshold);
        if clusters.len() == terms.len() {
            return PrimitiveObservable { model, terms };
        }
        let merged = clusters
            .into_iter()
            .map(|range| {
                let group = &terms[range];
                let weight: f64 = group.iter().map(|t| t.event.rank() as f64).sum();
                let value = if group.len() == 1 {
                    group[0].value
                } else {
                    group.iter().map(|t| t.value * t.event.rank() as f64).sum::<f64>() / weight
                };
                let event = group[1..]
                    .iter()
                    .fold(group[0].event.clone(), |acc, t| models::sum_unchecked(&acc, &t.event));
                SpectralTerm { value, event }
            })
            .collect();
        PrimitiveObservable { model, terms: merged }
    }

    /// The observable `0 = χ_0`.
    pub fn zero(model: Model) -> Self {
        PrimitiveObservable { model, terms: vec![SpectralTerm { value: 0.0, event: model.one() }] }
    }

    /// The unit observable `𝟙 = χ_𝟙`.
    pub fn unit(model: Model) -> Self {
        PrimitiveObservable { model, terms: vec![SpectralTerm { value: 1.0, event: model.one() }] }
    }

    /// Classical observable from its value function on the sample space.
    pub fn from_values(model: Model, values: Vec<f64>) -> Result<Self> {
        if model.is_quantum() {
            return Err(Error::ModelMismatch);
        }
        if values.len() != model.size() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvariantViolation(format!(
                "value function must have {} finite entries",
                model.size()
            )));
        }
        let scale = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        Ok(Realization::Values(values).into_observable(model, value_merge_threshold(scale)))
    }

    /// Quantum observable from a Hermitian matrix (its spectral measure).
    pub fn from_operator(model: Model, a: CMatrix) -> Result<Self> {
        if !model.is_quantum() {
            return Err(Error::ModelMismatch);
        }
        let d = model.size();
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::InvariantViolation(format!("expected a {d}x{d} matrix")));
        }
        let skew = linalg::spectral_norm(&(&a - a.adjoint()));
        if skew > model.tolerance() {
            return Err(Error::InvariantViolation(format!("operator is not Hermitian: {skew:e}")));
        }
        let r = Realization::Operator(linalg::hermitize(&a));
        let scale = r.norm();
        Ok(r.into_observable(model, cluster_threshold(ModelKind::Quantum, scale)))
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn terms(&self) -> &[SpectralTerm] {
        &self.terms
    }

    pub fn values(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.value).collect()
    }

    pub(crate) fn realization(&self) -> Realization {
        let mut r = Realization::zero(self.model);
        for t in &self.terms {
            r.axpy(t.value, &Realization::of_event(&t.event));
        }
        r
    }

    /// `A(X) = Σ t_j P_j`; the diagonal value matrix for classical models.
    pub fn operator(&self) -> CMatrix {
        match self.realization() {
            Realization::Operator(a) => a,
            Realization::Values(v) => {
                let n = v.len();
                CMatrix::from_fn(n, n, |i, j| c64(if i == j { v[i] } else { 0.0 }, 0.0))
            }
        }
    }

    /// Value function of a classical observable.
    pub fn value_function(&self) -> Option<Vec<f64>> {
        match self.realization() {
            Realization::Values(v) => Some(v),
            Realization::Operator(_) => None,
        }
    }
}

fn same_model(a: Model, b: Model) -> Result<()> {
    if a != b {
        return Err(Error::ModelMismatch);
    }
    Ok(())
}

/// `X(B)`: the orthogonal sum of the eigen-events whose value lies in `B`.
pub fn evaluate_spectral(x: &PrimitiveObservable, b: &BorelSet) -> Event {
    x.terms
        .iter()
        .filter(|t| b.contains(t.value))
        .fold(x.model.zero(), |acc, t| models::sum_unchecked(&acc, &t.event))
}

/// `χ_E`.
pub fn indicator(e: &Event) -> PrimitiveObservable {
    let model = e.model();
    let mut terms = Vec::with_capacity(2);
    let ec = models::complement(e);
    if !ec.is_zero() {
        terms.push(SpectralTerm { value: 0.0, event: ec });
    }
    if !e.is_zero() {
        terms.push(SpectralTerm { value: 1.0, event: e.clone() });
    }
    PrimitiveObservable { model, terms }
}

/// `‖X‖ = max |t_j|`.
pub fn norm(x: &PrimitiveObservable) -> f64 {
    x.terms.iter().fold(0.0, |m, t| f64::max(m, t.value.abs()))
}

/// `‖X − Y‖`, computed on the realizations.
pub fn distance(x: &PrimitiveObservable, y: &PrimitiveObservable) -> Result<f64> {
    same_model(x.model, y.model)?;
    let mut r = x.realization();
    r.axpy(-1.0, &y.realization());
    Ok(r.norm())
}

pub fn distribution(mu: &State, x: &PrimitiveObservable) -> Result<Distribution> {
    same_model(mu.model(), x.model)?;
    let atoms = x
        .terms
        .iter()
        .map(|t| Ok((t.value, states::evaluate(mu, &t.event)?)))
        .collect::<Result<_>>()?;
    Ok(Distribution { atoms })
}

/// `Exp_μ(X) = Σ t_j μ(E_j)`.
pub fn expectation(mu: &State, x: &PrimitiveObservable) -> Result<f64> {
    Ok(distribution(mu, x)?.mean())
}

/// `f(X)`: the spectral measure pushed forward along `f`. Events whose
/// images coincide (within the value-merge threshold) are summed.
///
/// `f` is only sampled at the spectrum and must return finite values there.
pub fn functional_calculus<F: Fn(f64) -> f64>(x: &PrimitiveObservable, f: F) -> PrimitiveObservable {
    let terms = x
        .terms
        .iter()
        .map(|t| {
            let value = f(t.value);
            assert!(value.is_finite(), "f({}) = {value} is not finite", t.value);
            SpectralTerm { value, event: t.event.clone() }
        })
        .collect();
    PrimitiveObservable::merge_values(x.model, terms, value_merge_threshold(norm(x)))
}

/// `X²`.
pub fn square(x: &PrimitiveObservable) -> PrimitiveObservable {
    functional_calculus(x, |t| t * t)
}

/// `sX`.
pub fn scale(s: f64, x: &PrimitiveObservable) -> PrimitiveObservable {
    functional_calculus(x, |t| s * t)
}

/// The unique observable whose expectation is additive in every state.
pub fn add(x: &PrimitiveObservable, y: &PrimitiveObservable) -> Result<PrimitiveObservable> {
    same_model(x.model, y.model)?;
    let mut r = x.realization();
    r.axpy(1.0, &y.realization());
    let threshold = cluster_threshold(x.model.kind(), norm(x) + norm(y));
    Ok(r.into_observable(x.model, threshold))
}

/// `X − Y`.
pub fn subtract(x: &PrimitiveObservable, y: &PrimitiveObservable) -> Result<PrimitiveObservable> {
    add(x, &scale(-1.0, y))
}

/// The `n`-cell midpoint quantizer on `[-r, r]`, clamped to that interval.
pub fn step_function(r: f64, n: u32) -> impl Fn(f64) -> f64 {
    let n = n as f64;
    move |s: f64| {
        if r == 0.0 {
            return 0.0;
        }
        (r * ((n * s / r).floor() + 0.5) / n).clamp(-r, r)
    }
}

/// `f_n(X)` for the `n`-cell step approximation of the identity on
/// `[-‖X‖, ‖X‖]`; `‖X − f_n(X)‖ ≤ ‖X‖/n`.
///
/// # Panics
/// If `n == 0`.
pub fn step_approximate(x: &PrimitiveObservable, n: u32) -> PrimitiveObservable {
    assert!(n > 0, "step count must be positive");
    functional_calculus(x, step_function(norm(x), n))
}

/// One extreme point `χ_plus − χ_minus` with its convex weight.
#[derive(Clone, Debug)]
pub struct ConvexTerm {
    pub weight: f64,
    pub plus: Event,
    pub minus: Event,
}

/// Writes `X` with `‖X‖ ≤ 1` as a finite convex combination of differences
/// of indicators, peeling off one layer per distinct absolute value.
pub fn convex_decompose(x: &PrimitiveObservable) -> Result<Vec<ConvexTerm>> {
    let model = x.model;
    let r = norm(x);
    if r > 1.0 + value_merge_threshold(1.0) {
        return Err(Error::NormExceedsOne { norm: r });
    }
    let mut levels: Vec<f64> = x.terms.iter().map(|t| t.value.abs()).filter(|a| *a > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut out = Vec::with_capacity(levels.len() + 1);
    let mut previous = 0.0;
    for &level in &levels {
        let mut plus = model.zero();
        let mut minus = model.zero();
        for t in &x.terms {
            if t.value >= level {
                plus = models::sum_unchecked(&plus, &t.event);
            } else if t.value <= -level {
                minus = models::sum_unchecked(&minus, &t.event);
            }
        }
        out.push(ConvexTerm { weight: level - previous, plus, minus });
        previous = level;
    }
    let rest = 1.0 - previous.min(1.0);
    if rest > 0.0 {
        out.push(ConvexTerm { weight: rest, plus: model.zero(), minus: model.zero() });
    }
    Ok(out)
}

/// `Σ λ_m (χ_{E_m} − χ_{F_m})` evaluated with `add` and `scale`.
pub fn reconstruct(model: Model, terms: &[ConvexTerm]) -> Result<PrimitiveObservable> {
    let mut acc = PrimitiveObservable::zero(model);
    for t in terms {
        let diff = subtract(&indicator(&t.plus), &indicator(&t.minus))?;
        acc = add(&acc, &scale(t.weight, &diff))?;
    }
    Ok(acc)
}

/// Seeded random observable with values in `[-bound, bound]`.
pub fn random_observable(model: Model, bound: f64, seed: u64) -> PrimitiveObservable {
    random_observable_with(model, bound, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Random spectral family (a random partition of a Haar basis, or of the
/// sample space) with i.i.d. uniform values. Partitions into fewer blocks
/// than points give degenerate spectra.
pub fn random_observable_with<R: Rng + ?Sized>(
    model: Model,
    bound: f64,
    rng: &mut R,
) -> PrimitiveObservable {
    let n = model.size();
    let blocks = rng.random_range(1..=n);
    let mut labels: Vec<usize> = (0..n).map(|i| if i < blocks { i } else { rng.random_range(0..blocks) }).collect();
    for i in (1..n).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }
    let values: Vec<f64> = (0..blocks).map(|_| rng.random_range(-bound..=bound)).collect();
    let terms: Vec<(f64, Event)> = match model.kind() {
        ModelKind::Classical => (0..blocks)
            .map(|b| {
                let bits = (0..n).filter(|&i| labels[i] == b).fold(0u64, |acc, i| acc | 1 << i);
                (values[b], Event::classical(model, bits))
            })
            .collect(),
        ModelKind::Quantum => {
            let u = linalg::haar_unitary(rng, n);
            (0..blocks)
                .map(|b| {
                    let mut p = CMatrix::zeros(n, n);
                    for i in (0..n).filter(|&i| labels[i] == b) {
                        let v = u.column(i);
                        p += v * v.adjoint();
                    }
                    (values[b], Event::quantum_unchecked(model, p))
                })
                .collect()
        }
    };
    let scale = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let terms = terms.into_iter().map(|(value, event)| SpectralTerm { value, event }).collect();
    PrimitiveObservable::merge_values(model, terms, value_merge_threshold(scale))
}
