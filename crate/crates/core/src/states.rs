//! σ-additive states and their conditional probabilities.
//!
//! Classical states are probability vectors and condition by Bayes'
//! restriction. Quantum states are density matrices and condition by the
//! Lüders compression `PρP / tr(ρP)`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMatrix, CVector};
use crate::models::{self, Event, EventPayload, Model, ModelKind};

/// Conditioning on events with probability at or below this is refused.
pub const CONDITIONING_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug)]
pub(crate) enum StatePayload {
    Classical(Vec<f64>),
    Quantum(CMatrix),
}

#[derive(Clone, Debug)]
pub struct State {
    model: Model,
    payload: StatePayload,
}

impl State {
    /// Classical state from nonnegative weights, normalized to sum 1.
    pub fn from_probabilities(model: Model, weights: Vec<f64>) -> Result<Self> {
        if model.is_quantum() {
            return Err(Error::ModelMismatch);
        }
        if weights.len() != model.size() {
            return Err(Error::InvariantViolation(format!(
                "probability vector has length {}, expected {}",
                weights.len(),
                model.size()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvariantViolation(
                "probabilities must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvariantViolation("probabilities sum to zero".into()));
        }
        // already-normalized input is kept verbatim so encodings round-trip
        let p = if (total - 1.0).abs() <= 4.0 * f64::EPSILON * weights.len() as f64 {
            weights
        } else {
            weights.into_iter().map(|w| w / total).collect()
        };
        Ok(State { model, payload: StatePayload::Classical(p) })
    }

    /// Point mass on sample point `i`.
    pub fn point_mass(model: Model, i: usize) -> Result<Self> {
        let mut p = vec![0.0; model.size()];
        if i >= p.len() {
            return Err(Error::InvariantViolation(format!("sample point {i} out of range")));
        }
        p[i] = 1.0;
        Self::from_probabilities(model, p)
    }

    /// Quantum state from a density matrix. Checks Hermiticity, positivity
    /// and unit trace against the model tolerance, then Hermitizes, clips
    /// negative eigenvalues and renormalizes.
    pub fn from_density(model: Model, rho: CMatrix) -> Result<Self> {
        if !model.is_quantum() {
            return Err(Error::ModelMismatch);
        }
        let d = model.size();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::InvariantViolation(format!(
                "expected a {d}x{d} density matrix, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvariantViolation("density matrix has non-finite entries".into()));
        }
        let tol = model.tolerance();
        let skew = linalg::spectral_norm(&(&rho - rho.adjoint()));
        if skew > tol {
            return Err(Error::InvariantViolation(format!(
                "density matrix is not Hermitian: |rho - rho*| = {skew:e}"
            )));
        }
        let trace = linalg::trace_re(&rho);
        if (trace - 1.0).abs() > tol {
            return Err(Error::InvariantViolation(format!(
                "density matrix has trace {trace}, expected 1"
            )));
        }
        Self::canonical_density(model, linalg::hermitize(&rho))
    }

    fn canonical_density(model: Model, rho: CMatrix) -> Result<Self> {
        let (values, vectors) = linalg::eigh(&rho);
        let min = values.first().copied().unwrap_or(0.0);
        if min < -model.tolerance() {
            return Err(Error::InvariantViolation(format!(
                "density matrix has eigenvalue {min:e} < 0"
            )));
        }
        let d = model.size();
        // rounding-level negative eigenvalues are left alone so encodings round-trip
        let rho = if min < -8.0 * f64::EPSILON * d as f64 {
            let clipped = DMatrix::from_fn(d, d, |i, j| {
                c64(if i == j { values[i].max(0.0) } else { 0.0 }, 0.0)
            });
            &vectors * clipped * vectors.adjoint()
        } else {
            rho
        };
        let trace = linalg::trace_re(&rho);
        let rho = if (trace - 1.0).abs() <= 4.0 * f64::EPSILON * d as f64 {
            linalg::hermitize(&rho)
        } else {
            linalg::hermitize(&rho.unscale(trace))
        };
        Ok(State { model, payload: StatePayload::Quantum(rho) })
    }

    /// Pure state `|v⟩⟨v|` for a nonzero vector `v`.
    pub fn pure(model: Model, vector: &CVector) -> Result<Self> {
        if !model.is_quantum() {
            return Err(Error::ModelMismatch);
        }
        if vector.len() != model.size() {
            return Err(Error::InvariantViolation(format!(
                "state vector has length {}, expected {}",
                vector.len(),
                model.size()
            )));
        }
        let norm = vector.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::InvariantViolation("state vector must be nonzero".into()));
        }
        let v = vector.unscale(norm);
        Ok(State { model, payload: StatePayload::Quantum(&v * v.adjoint()) })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn probabilities(&self) -> Option<&[f64]> {
        match &self.payload {
            StatePayload::Classical(p) => Some(p),
            StatePayload::Quantum(_) => None,
        }
    }

    pub fn density(&self) -> Option<&CMatrix> {
        match &self.payload {
            StatePayload::Quantum(rho) => Some(rho),
            StatePayload::Classical(_) => None,
        }
    }

    /// Density matrix of the state; diagonal for classical states.
    pub fn to_matrix(&self) -> CMatrix {
        match &self.payload {
            StatePayload::Quantum(rho) => rho.clone(),
            StatePayload::Classical(p) => {
                let n = p.len();
                CMatrix::from_fn(n, n, |i, j| c64(if i == j { p[i] } else { 0.0 }, 0.0))
            }
        }
    }
}

/// `μ(E)`.
pub fn evaluate(mu: &State, e: &Event) -> Result<f64> {
    if mu.model != e.model() {
        return Err(Error::ModelMismatch);
    }
    Ok(match (&mu.payload, e.payload()) {
        (StatePayload::Classical(p), EventPayload::Classical(bits)) => {
            (0..p.len()).filter(|i| bits >> i & 1 == 1).map(|i| p[i]).sum::<f64>().min(1.0)
        }
        (StatePayload::Quantum(rho), EventPayload::Quantum(proj)) => {
            linalg::trace_product_re(rho, proj).clamp(0.0, 1.0)
        }
        _ => unreachable!("payload kind follows the model"),
    })
}

fn conditioning_probability(mu: &State, e: &Event) -> Result<f64> {
    let probability = evaluate(mu, e)?;
    if probability <= CONDITIONING_THRESHOLD {
        return Err(Error::ConditioningOnNull { probability });
    }
    Ok(probability)
}

/// The conditional probability `μ_E`.
pub fn conditional(mu: &State, e: &Event) -> Result<State> {
    let probability = conditioning_probability(mu, e)?;
    match (&mu.payload, e.payload()) {
        (StatePayload::Classical(p), EventPayload::Classical(bits)) => {
            let q = (0..p.len())
                .map(|i| if bits >> i & 1 == 1 { p[i] } else { 0.0 })
                .collect();
            State::from_probabilities(mu.model, q)
        }
        (StatePayload::Quantum(rho), EventPayload::Quantum(proj)) => {
            let compressed = linalg::hermitize(&(proj * rho * proj)).unscale(probability);
            State::canonical_density(mu.model, compressed)
        }
        _ => unreachable!("payload kind follows the model"),
    }
}

/// Checks that the conditional state is the only state supported below `E`
/// that reproduces `μ(F)/μ(E)` on a spanning family of sub-events `F ≺ E`.
///
/// Candidates are parametrized as `σ = V S V*` with `V` an orthonormal basis
/// of the range of `E` and `S` Hermitian (`r²` real unknowns); a state with
/// `tr(σE) = 1` is necessarily of this form. Constraints come from rank-1
/// sub-events along random vectors of the range, plus the trace condition.
/// Returns true when the constraint matrix has full rank and the
/// least-squares solution matches the Lüders state to `10³·tol`.
pub fn conditional_uniqueness_probe(mu: &State, e: &Event, trials: usize, seed: u64) -> Result<bool> {
    let probability = conditioning_probability(mu, e)?;
    let expected = conditional(mu, e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match e.model().kind() {
        ModelKind::Classical => {
            // Singletons below E determine the restriction outright.
            let sub = e.indices().expect("classical event");
            let p = mu.probabilities().expect("classical state");
            let q = expected.probabilities().expect("classical state");
            Ok(sub.iter().all(|&i| (p[i] / probability - q[i]).abs() <= 10.0 * f64::EPSILON))
        }
        ModelKind::Quantum => {
            let proj = e.projection().expect("quantum event");
            let (values, vectors) = linalg::eigh(proj);
            let r = e.rank();
            let d = e.model().size();
            let basis = vectors.columns(d - r, r).into_owned();
            debug_assert!(values[d - r..].iter().all(|v| (v - 1.0).abs() < 1e-6));
            let unknowns = r * r;
            let rows = unknowns + 2;
            let rho = mu.density().expect("quantum state");
            for _ in 0..trials.max(1) {
                let mut a = DMatrix::<f64>::zeros(rows + 1, unknowns);
                let mut b = nalgebra::DVector::<f64>::zeros(rows + 1);
                for k in 0..rows {
                    let c = linalg::gaussian_matrix(&mut rng, r, 1).column(0).into_owned();
                    let c = c.unscale(c.norm());
                    let v = &basis * &c;
                    let f = &v * v.adjoint();
                    fill_quadratic_form_row(&mut a, k, &c);
                    b[k] = linalg::trace_product_re(rho, &f) / probability;
                }
                // tr(σE) = tr S = 1
                for i in 0..r {
                    a[(rows, i)] = 1.0;
                }
                b[rows] = 1.0;

                let svd = a.svd(true, true);
                let smax = svd.singular_values.max();
                let rank = svd.singular_values.iter().filter(|s| **s > 1e-10 * smax).count();
                if rank < unknowns {
                    continue;
                }
                let x = svd
                    .solve(&b, 1e-12 * smax)
                    .map_err(|e| Error::InvariantViolation(e.to_string()))?;
                let s = unpack_hermitian(&x, r);
                let sigma = &basis * s * basis.adjoint();
                let target = expected.density().expect("quantum state");
                let err = linalg::spectral_norm(&(sigma - target));
                return Ok(err <= 1e3 * e.model().tolerance());
            }
            Err(Error::DegenerateSpanningFamily { trials })
        }
    }
}

// Unknown layout: S_ii for i < r, then (Re S_ij, Im S_ij) for i < j.
fn fill_quadratic_form_row(a: &mut DMatrix<f64>, row: usize, c: &CVector) {
    let r = c.len();
    for i in 0..r {
        a[(row, i)] = c[i].norm_sqr();
    }
    let mut col = r;
    for i in 0..r {
        for j in i + 1..r {
            // c* S c picks up 2 Re(conj(c_i) c_j S_ij) from the (i,j) pair
            let w = c[i].conj() * c[j];
            a[(row, col)] = 2.0 * w.re;
            a[(row, col + 1)] = -2.0 * w.im;
            col += 2;
        }
    }
}

fn unpack_hermitian(x: &nalgebra::DVector<f64>, r: usize) -> CMatrix {
    let mut s = CMatrix::zeros(r, r);
    for i in 0..r {
        s[(i, i)] = c64(x[i], 0.0);
    }
    let mut col = r;
    for i in 0..r {
        for j in i + 1..r {
            let z = c64(x[col], x[col + 1]);
            s[(i, j)] = z;
            s[(j, i)] = z.conj();
            col += 2;
        }
    }
    s
}

/// Seeded random state: normalized uniform weights, or a normalized
/// Ginibre product `GG*`.
pub fn random_state(model: Model, seed: u64) -> State {
    random_state_with(model, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_state_with<R: Rng + ?Sized>(model: Model, rng: &mut R) -> State {
    let d = model.size();
    let payload = match model.kind() {
        ModelKind::Classical => {
            // (0,1] keeps the sum away from zero
            let w: Vec<f64> = (0..d).map(|_| 1.0 - rng.random::<f64>()).collect();
            let total: f64 = w.iter().sum();
            StatePayload::Classical(w.into_iter().map(|x| x / total).collect())
        }
        ModelKind::Quantum => {
            let g = linalg::gaussian_matrix(rng, d, d);
            let rho = &g * g.adjoint();
            let trace = linalg::trace_re(&rho);
            StatePayload::Quantum(linalg::hermitize(&rho.unscale(trace)))
        }
    };
    State { model, payload }
}

/// A state assigning different probabilities to two unequal events.
pub fn separating_state(e: &Event, f: &Event) -> Result<State> {
    if models::events_equal(e, f)? {
        return Err(Error::EventsEqual);
    }
    let model = e.model();
    match (e.payload(), f.payload()) {
        (EventPayload::Classical(a), EventPayload::Classical(b)) => {
            let point = (a ^ b).trailing_zeros() as usize;
            State::point_mass(model, point)
        }
        (EventPayload::Quantum(p), EventPayload::Quantum(q)) => {
            let (values, vectors) = linalg::eigh(&(p - q));
            let d = model.size();
            let top = if values[0].abs() > values[d - 1].abs() { 0 } else { d - 1 };
            State::pure(model, &vectors.column(top).into_owned())
        }
        _ => unreachable!("payload kind follows the model"),
    }
}
