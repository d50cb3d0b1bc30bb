//! Seeded property checks over the axioms and theorems implemented by this
//! crate, with a serializable report.
//!
//! Every check is a function of one trial: it draws inputs from a private
//! RNG stream, evaluates the relevant identities and records measured
//! residuals against bounds. A check passes when every measurement of every
//! trial is within its bound. The one exception is `S7.nonassoc-quantum`,
//! an existence check that passes as soon as some trial exhibits a large
//! associativity residual.

mod checks;
mod gen;
mod trial;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg;
use crate::models::{Model, ModelKind};
use crate::observables::{self, PrimitiveObservable};
use crate::states::{self, State};
use trial::{Measurement, Relation, Trial};

pub use checks::CHECK_IDS;

pub const DEFAULT_TRIALS: usize = 500;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const REPORT_SCHEMA: u32 = 1;

/// Trial budget of the non-associativity search.
pub const WITNESS_SEARCH_BUDGET: usize = 10_000;
/// Residual a non-associativity witness has to exceed.
pub const WITNESS_THRESHOLD: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub id: String,
    pub model: Model,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl CheckSpec {
    pub fn new(id: impl Into<String>, model: Model) -> Self {
        CheckSpec {
            id: id.into(),
            model,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

/// One spec per registered check, all on the same model.
pub fn full_suite(model: Model, trials: usize, seed: u64, tolerance: f64) -> Vec<CheckSpec> {
    CHECK_IDS
        .iter()
        .map(|id| CheckSpec::new(*id, model).with_trials(trials).with_seed(seed).with_tolerance(tolerance))
        .collect()
}

/// The most severe measurement of a check, with the inputs that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub label: String,
    pub residual: f64,
    pub bound: f64,
    /// `"<="` for residual bounds, `">"` for thresholds to exceed.
    pub relation: String,
    pub trial: usize,
    pub trial_seed: u64,
    pub inputs: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub passed: bool,
    /// Model the trials actually ran on.
    pub model: Model,
    pub seed: u64,
    pub tolerance: f64,
    pub trials_run: usize,
    pub worst: Option<WorstCase>,
    pub elapsed_ms: f64,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub toolkit_version: String,
    /// Shared model of all requested checks, if there is one.
    pub model: Option<Model>,
    /// Shared seed of all requested checks, if there is one.
    pub seed: Option<u64>,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs every spec in order. Identical specs give identical reports apart
/// from the `elapsed_ms` fields.
pub fn run_suite(specs: &[CheckSpec]) -> Result<VerificationReport> {
    for spec in specs {
        validate(spec)?;
    }
    let checks = specs.iter().map(run_check).collect::<Result<Vec<_>>>()?;
    let first = specs.first();
    let model = first.filter(|f| specs.iter().all(|s| s.model == f.model)).map(|f| f.model);
    let seed = first.filter(|f| specs.iter().all(|s| s.seed == f.seed)).map(|f| f.seed);
    Ok(VerificationReport {
        schema: REPORT_SCHEMA,
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        model,
        seed,
        checks,
    })
}

fn validate(spec: &CheckSpec) -> Result<()> {
    checks::lookup(&spec.id)?;
    if spec.trials == 0 {
        return Err(Error::InvalidModel("a check needs at least one trial".into()));
    }
    if !(spec.tolerance.is_finite() && spec.tolerance > 0.0) {
        return Err(Error::InvalidModel(format!("check tolerance {} must be positive", spec.tolerance)));
    }
    trial_model(spec).map(|_| ())
}

/// Smallest tolerance used to validate events built during trials. Check
/// tolerances below it still decide pass or fail.
pub const STRUCTURAL_TOLERANCE_FLOOR: f64 = 1e-12;

/// Model the trials of `spec` run on: the requested one with its tolerance
/// replaced by the check tolerance (floored), except for the checks that are tied to
/// one kind of model.
fn trial_model(spec: &CheckSpec) -> Result<Model> {
    let m = spec.model;
    let tol = spec.tolerance.max(STRUCTURAL_TOLERANCE_FLOOR);
    match spec.id.as_str() {
        checks::ASSOC_CLASSICAL => Model::classical(m.size()),
        checks::NONASSOC_QUANTUM => Model::new(ModelKind::Quantum, 2, tol),
        _ => match m.kind() {
            ModelKind::Classical => Ok(m),
            ModelKind::Quantum => Model::new(ModelKind::Quantum, m.size(), tol),
        },
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` of check `id`, derived from the suite seed.
pub fn trial_seed(seed: u64, id: &str, index: usize) -> u64 {
    splitmix(splitmix(seed ^ fnv1a(id)).wrapping_add(index as u64))
}

struct TrialOutcome {
    index: usize,
    seed: u64,
    worst: Measurement,
    passed: bool,
}

fn run_trial(
    check: checks::CheckFn,
    model: Model,
    spec: &CheckSpec,
    index: usize,
    record: bool,
) -> (Vec<Measurement>, Option<serde_json::Map<String, Value>>, u64) {
    let seed = trial_seed(spec.seed, &spec.id, index);
    let mut t = Trial::new(model, spec.tolerance, index, ChaCha8Rng::seed_from_u64(seed), record);
    if let Err(e) = check(&mut t) {
        t.at_most(format!("unexpected error: {e}"), f64::INFINITY, 0.0);
    }
    let (measurements, inputs) = t.finish();
    (measurements, inputs, seed)
}

fn evaluate_trial(check: checks::CheckFn, model: Model, spec: &CheckSpec, index: usize) -> TrialOutcome {
    let (measurements, _, seed) = run_trial(check, model, spec, index, false);
    let passed = measurements.iter().all(Measurement::passed);
    let worst = measurements
        .into_iter()
        .max_by(compare)
        .unwrap_or_else(|| Measurement {
            label: "no measurement".into(),
            value: f64::INFINITY,
            bound: 0.0,
            relation: Relation::AtMost,
        });
    let passed = passed && worst.value.is_finite();
    TrialOutcome { index, seed, worst, passed }
}

fn compare(a: &Measurement, b: &Measurement) -> std::cmp::Ordering {
    let (fa, sa) = a.rank_key();
    let (fb, sb) = b.rank_key();
    fa.cmp(&fb).then(sa.total_cmp(&sb))
}

fn witness(check: checks::CheckFn, model: Model, spec: &CheckSpec, outcome: &TrialOutcome) -> WorstCase {
    let (_, inputs, _) = run_trial(check, model, spec, outcome.index, true);
    let m = &outcome.worst;
    WorstCase {
        label: m.label.clone(),
        residual: m.value,
        bound: m.bound,
        relation: match m.relation {
            Relation::AtMost => "<=".into(),
            Relation::Exceeds => ">".into(),
        },
        trial: outcome.index,
        trial_seed: outcome.seed,
        inputs: Value::Object(inputs.unwrap_or_default()),
    }
}

fn run_check(spec: &CheckSpec) -> Result<CheckResult> {
    let start = Instant::now();
    let check = checks::lookup(&spec.id)?;
    let model = trial_model(spec)?;
    let (passed, trials_run, worst) = if spec.id == checks::NONASSOC_QUANTUM {
        search_witness(check, model, spec)
    } else {
        let outcomes: Vec<TrialOutcome> =
            (0..spec.trials).into_par_iter().map(|i| evaluate_trial(check, model, spec, i)).collect();
        let passed = outcomes.iter().all(|o| o.passed);
        let worst = outcomes
            .iter()
            .reduce(|a, b| if compare(&b.worst, &a.worst).is_gt() { b } else { a })
            .expect("at least one trial");
        (passed, spec.trials, witness(check, model, spec, worst))
    };
    let note = checks::note(&spec.id, spec.model, model);
    Ok(CheckResult {
        id: spec.id.clone(),
        passed,
        model,
        seed: spec.seed,
        tolerance: spec.tolerance,
        trials_run,
        worst: Some(worst),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        note,
    })
}

/// Batches of `spec.trials` trials until one exceeds the threshold or the
/// budget is spent. The reported witness is the largest residual seen.
fn search_witness(check: checks::CheckFn, model: Model, spec: &CheckSpec) -> (bool, usize, WorstCase) {
    let budget = spec.trials.max(WITNESS_SEARCH_BUDGET);
    let mut best: Option<TrialOutcome> = None;
    let mut start = 0;
    while start < budget {
        let end = (start + spec.trials).min(budget);
        let batch: Vec<TrialOutcome> =
            (start..end).into_par_iter().map(|i| evaluate_trial(check, model, spec, i)).collect();
        for o in batch {
            let better = match &best {
                None => true,
                Some(b) => o.worst.value.total_cmp(&b.worst.value).is_gt(),
            };
            if better && o.worst.value.is_finite() {
                best = Some(o);
            }
        }
        start = end;
        if best.as_ref().is_some_and(|b| b.passed) {
            break;
        }
    }
    let best = best.unwrap_or_else(|| evaluate_trial(check, model, spec, 0));
    (best.passed, start, witness(check, model, spec, &best))
}

/// Re-runs the trial behind a witness and returns the residual it measures
/// for the witness label. Fails if the regenerated inputs differ from the
/// recorded ones.
pub fn replay(spec: &CheckSpec, witness: &WorstCase) -> Result<f64> {
    validate(spec)?;
    let check = checks::lookup(&spec.id)?;
    let model = trial_model(spec)?;
    let (measurements, inputs, _) = run_trial(check, model, spec, witness.trial, true);
    if Value::Object(inputs.unwrap_or_default()) != witness.inputs {
        return Err(Error::Witness(format!("trial {} regenerated different inputs", witness.trial)));
    }
    measurements
        .iter()
        .find(|m| m.label == witness.label)
        .map(|m| m.value)
        .ok_or_else(|| Error::Witness(format!("trial {} has no measurement `{}`", witness.trial, witness.label)))
}

/// Threshold below which two observables count as equal.
fn observable_tolerance(x: &PrimitiveObservable, y: &PrimitiveObservable) -> f64 {
    let scale = observables::norm(x).max(observables::norm(y));
    x.model().tolerance().max(observables::value_merge_threshold(scale))
}

/// A state maximizing `|Exp_μ(X) − Exp_μ(Y)|`, and that gap.
pub(crate) fn separating_state_for(x: &PrimitiveObservable, y: &PrimitiveObservable) -> Result<(State, f64)> {
    let model = x.model();
    if model != y.model() {
        return Err(Error::ModelMismatch);
    }
    let diff = x.operator() - y.operator();
    let mu = match model.kind() {
        ModelKind::Classical => {
            let i = (0..model.size())
                .max_by(|&i, &j| diff[(i, i)].re.abs().total_cmp(&diff[(j, j)].re.abs()))
                .expect("nonempty model");
            State::point_mass(model, i)?
        }
        ModelKind::Quantum => {
            let (values, vectors) = linalg::eigh(&linalg::hermitize(&diff));
            let d = model.size();
            let top = if values[0].abs() > values[d - 1].abs() { 0 } else { d - 1 };
            State::pure(model, &vectors.column(top).into_owned())?
        }
    };
    let gap = (observables::expectation(&mu, x)? - observables::expectation(&mu, y)?).abs();
    Ok((mu, gap))
}

/// Decides equality of two observables through their expectations.
///
/// If `X` and `Y` differ beyond tolerance, returns whether a state with
/// `|Exp_μ(X) − Exp_μ(Y)|` above tolerance was found. If they agree,
/// returns whether their expectations also agree on `trials` random states.
pub fn expectation_separation_check(
    x: &PrimitiveObservable,
    y: &PrimitiveObservable,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let tol = observable_tolerance(x, y);
    if observables::distance(x, y)? > tol {
        let (_, gap) = separating_state_for(x, y)?;
        return Ok(gap > tol);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slack = tol + 1e-12 * observables::norm(x).max(1.0);
    for _ in 0..trials {
        let mu = states::random_state_with(x.model(), &mut rng);
        let gap = (observables::expectation(&mu, x)? - observables::expectation(&mu, y)?).abs();
        if gap > slack {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::random_event;
    use crate::observables::{indicator, random_observable};

    #[test]
    fn registry_matches_implementations() {
        let mut seen = std::collections::HashSet::new();
        for id in CHECK_IDS {
            assert!(checks::lookup(id).is_ok(), "{id} has no implementation");
            assert!(seen.insert(*id), "{id} registered twice");
        }
        assert_eq!(checks::implemented().count(), CHECK_IDS.len());
        for id in checks::implemented() {
            assert!(CHECK_IDS.contains(&id), "{id} is implemented but not registered");
        }
    }

    #[test]
    fn unknown_id_is_rejected() {
        let spec = CheckSpec::new("OS7", Model::classical(3).unwrap());
        assert_eq!(run_suite(&[spec]), Err(Error::UnknownCheckId("OS7".into())));
    }

    #[test]
    fn empty_suite_passes() {
        let report = run_suite(&[]).unwrap();
        assert!(report.checks.is_empty());
        assert!(report.passed());
        assert_eq!(report.schema, 1);
    }

    #[test]
    fn trial_seeds_depend_on_id_and_index() {
        assert_ne!(trial_seed(42, "OS1", 0), trial_seed(42, "OS2", 0));
        assert_ne!(trial_seed(42, "OS1", 0), trial_seed(42, "OS1", 1));
        assert_ne!(trial_seed(42, "OS1", 0), trial_seed(43, "OS1", 0));
        assert_eq!(trial_seed(42, "OS1", 5), trial_seed(42, "OS1", 5));
    }

    #[test]
    fn separation_of_equal_and_unequal_observables() {
        let q = Model::quantum(3).unwrap();
        let x = random_observable(q, 1.0, 1);
        assert!(expectation_separation_check(&x, &x, 50, 2).unwrap());
        let y = random_observable(q, 1.0, 3);
        assert!(expectation_separation_check(&x, &y, 50, 2).unwrap());

        let e = random_event(q, 1, 5).unwrap();
        let f = random_event(q, 2, 6).unwrap();
        assert!(expectation_separation_check(&indicator(&e), &indicator(&f), 10, 0).unwrap());
    }

    #[test]
    fn replay_reproduces_the_witness() {
        let spec = CheckSpec::new("T6.1.i", Model::quantum(3).unwrap()).with_trials(20);
        let report = run_suite(std::slice::from_ref(&spec)).unwrap();
        let worst = report.checks[0].worst.clone().unwrap();
        let again = replay(&spec, &worst).unwrap();
        assert_eq!(again, worst.residual);
    }
}
