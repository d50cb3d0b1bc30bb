//! The check registry and one trial function per check.

use rand::Rng;
use serde_json::json;

use super::gen;
use super::trial::Trial;
use crate::error::{Error, Result};
use crate::jordan::{self, ProductPath};
use crate::linalg::{self, CMatrix, CVector};
use crate::models::{self, Event, Model, ModelKind};
use crate::observables::{self as obs, PrimitiveObservable};
use crate::serial;
use crate::states::{self, State};

pub(crate) type CheckFn = fn(&mut Trial) -> Result<()>;

pub(crate) const ASSOC_CLASSICAL: &str = "S7.assoc-classical";
pub(crate) const NONASSOC_QUANTUM: &str = "S7.nonassoc-quantum";

/// Every implemented check id, in report order.
pub const CHECK_IDS: &[&str] = &[
    "OS1",
    "OS2",
    "OS3",
    "OS4",
    "OS5",
    "OS6",
    "UC1",
    "UC2",
    "A1",
    "A2",
    "A3",
    "L5.1.i",
    "L5.1.ii",
    "L5.2.i",
    "L5.2.ii",
    "T6.1.i",
    "T6.1.ii",
    "T6.1.iii",
    "L7.1",
    "T7.2",
    ASSOC_CLASSICAL,
    NONASSOC_QUANTUM,
];

const REGISTRY: &[(&str, CheckFn)] = &[
    ("OS1", os1),
    ("OS2", os2),
    ("OS3", os3),
    ("OS4", os4),
    ("OS5", os5),
    ("OS6", os6),
    ("UC1", uc1),
    ("UC2", uc2),
    ("A1", a1),
    ("A2", a2),
    ("A3", a3),
    ("L5.1.i", l51_i),
    ("L5.1.ii", l51_ii),
    ("L5.2.i", l52_i),
    ("L5.2.ii", l52_ii),
    ("T6.1.i", t61_i),
    ("T6.1.ii", t61_ii),
    ("T6.1.iii", t61_iii),
    ("L7.1", l71),
    ("T7.2", t72),
    (ASSOC_CLASSICAL, assoc_classical),
    (NONASSOC_QUANTUM, nonassoc_quantum),
];

pub(crate) fn lookup(id: &str) -> Result<CheckFn> {
    REGISTRY
        .iter()
        .find(|(name, _)| *name == id)
        .map(|(_, f)| *f)
        .ok_or_else(|| Error::UnknownCheckId(id.to_string()))
}

#[cfg(test)]
pub(crate) fn implemented() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|(name, _)| *name)
}

/// Report annotation for checks whose scope differs from the literal
/// statement, or that ran on a different model than requested.
pub(crate) fn note(id: &str, requested: Model, used: Model) -> Option<String> {
    let mut parts = Vec::new();
    if requested.kind() != used.kind() || requested.size() != used.size() {
        parts.push(format!("ran on {used} instead of the requested {requested}"));
    }
    match id {
        "UC2" if used.is_quantum() && used.size() == 2 => parts.push(
            "d=2: uniqueness is established among density-matrix states only; \
             the qubit also carries states that are not of this form"
                .into(),
        ),
        "L5.2.i" => parts.push(
            "scoped interpretation: every observable here is already primitive, so the check \
             verifies the r/n convergence rate of the step approximations and the monotone \
             decrease of the uniform step error, not density in a larger space"
                .into(),
        ),
        NONASSOC_QUANTUM => parts.push(
            "existence check: passes when some trial exceeds the threshold; \
             trial 0 is the analytic pair P=diag(1,0), Q onto (1,1)/√2"
                .into(),
        ),
        _ => {}
    }
    (!parts.is_empty()).then(|| parts.join("; "))
}

// Input generation with fixed corner cases in the first trials.

fn edge_event(t: &mut Trial, slot: usize) -> Event {
    let m = t.model;
    match (t.index, slot) {
        (0, 0) => m.zero(),
        (1, 0) => m.one(),
        (2, 0) => models::random_event_with(m, m.size() - 1, &mut t.rng).expect("rank in range"),
        _ => gen::event(&mut t.rng, m),
    }
}

fn edge_observable(t: &mut Trial, slot: usize, bound: f64) -> PrimitiveObservable {
    let m = t.model;
    match (t.index, slot) {
        (0, 0) => PrimitiveObservable::zero(m),
        (1, 0) => PrimitiveObservable::unit(m),
        // two eigenvalues of multiplicity ≈ size/2
        (2, _) | (3, 0) => {
            let e = models::random_event_with(m, m.size().div_ceil(2), &mut t.rng).expect("rank in range");
            let a = t.rng.random_range(-bound..=bound);
            let b = t.rng.random_range(-bound..=bound);
            PrimitiveObservable::from_terms(m, vec![(a, e.clone()), (b, models::complement(&e))])
                .expect("complementary events")
        }
        _ => gen::observable(&mut t.rng, m, bound),
    }
}

fn nonzero_state(t: &mut Trial, e: &Event) -> Result<State> {
    let mu = gen::state(&mut t.rng, t.model);
    if states::evaluate(&mu, e)? > states::CONDITIONING_THRESHOLD {
        return Ok(mu);
    }
    // full-rank states charge every nonzero event
    Ok(gen::mixed_state(&mut t.rng, t.model))
}

fn rec_event(t: &mut Trial, name: &str, e: &Event) {
    t.record(name, || serial::event_to_json(e));
}

fn rec_state(t: &mut Trial, name: &str, mu: &State) {
    t.record(name, || serial::state_to_json(mu));
}

fn rec_obs(t: &mut Trial, name: &str, x: &PrimitiveObservable) {
    t.record(name, || serial::observable_to_json(x));
}

fn dist(a: &PrimitiveObservable, b: &PrimitiveObservable) -> Result<f64> {
    obs::distance(a, b)
}

/// `‖P² − P‖`, zero for classical events.
fn idempotency_defect(e: &Event) -> f64 {
    e.projection().map_or(0.0, |p| linalg::spectral_norm(&(p * p - p)))
}

// Orthospace

fn os1(t: &mut Trial) -> Result<()> {
    let e = edge_event(t, 0);
    let f = if t.index.is_multiple_of(2) {
        gen::event(&mut t.rng, t.model)
    } else {
        let e_c = models::complement(&e);
        gen::sub_event(&mut t.rng, &e_c)
    };
    rec_event(t, "E", &e);
    rec_event(t, "F", &f);
    let ef = models::is_orthogonal(&e, &f)?;
    let fe = models::is_orthogonal(&f, &e)?;
    t.holds("E ⊥ F ⇔ F ⊥ E", ef == fe);
    let asym = (models::overlap(&e, &f)? - models::overlap(&f, &e)?).abs();
    t.at_most("overlap asymmetry", asym, t.tol);
    Ok(())
}

fn os2(t: &mut Trial) -> Result<()> {
    let k = 2;
    let fam = gen::orthogonal_family(&mut t.rng, t.model, k);
    let (e, f) = (&fam[0], &fam[1]);
    rec_event(t, "E", e);
    rec_event(t, "F", f);
    let ef = models::ortho_sum(e, f)?;
    let fe = models::ortho_sum(f, e)?;
    t.at_most("E+F = F+E", models::event_distance(&ef, &fe)?, t.tol);
    t.at_most("E+F is a projection", idempotency_defect(&ef), 10.0 * t.tol);
    t.holds("rank(E+F) = rank E + rank F", ef.rank() == e.rank() + f.rank());

    let g = gen::nonzero_event(&mut t.rng, t.model);
    let h = gen::nonzero_event(&mut t.rng, t.model);
    if models::overlap(&g, &h)? > t.model.tolerance() {
        let refused = matches!(models::ortho_sum(&g, &h), Err(Error::NotOrthogonal { .. }));
        t.holds("sum of non-orthogonal events is undefined", refused);
    }
    Ok(())
}

fn os3(t: &mut Trial) -> Result<()> {
    let fam = gen::orthogonal_family(&mut t.rng, t.model, 3);
    let (d, e, f) = (&fam[0], &fam[1], &fam[2]);
    rec_event(t, "D", d);
    rec_event(t, "E", e);
    rec_event(t, "F", f);
    let e_f = models::ortho_sum(e, f)?;
    let d_e = models::ortho_sum(d, e)?;
    t.holds("D ⊥ E+F", models::is_orthogonal(d, &e_f)?);
    t.holds("F ⊥ D+E", models::is_orthogonal(f, &d_e)?);
    let left = models::ortho_sum(d, &e_f)?;
    let right = models::ortho_sum(&d_e, f)?;
    t.at_most("D+(E+F) = (D+E)+F", models::event_distance(&left, &right)?, 10.0 * t.tol);

    // a maximal orthogonal family sums to an event of the summed rank
    let n = t.model.size();
    let family = gen::orthogonal_family(&mut t.rng, t.model, n);
    let mut total = t.model.zero();
    let mut rank = 0;
    for g in &family {
        total = models::ortho_sum(&total, g)?;
        rank += g.rank();
    }
    t.holds("rank of an orthogonal sum", total.rank() == rank && rank <= n);
    t.at_most("orthogonal sum is a projection", idempotency_defect(&total), 10.0 * t.tol);
    Ok(())
}

fn os4(t: &mut Trial) -> Result<()> {
    let e = edge_event(t, 0);
    rec_event(t, "E", &e);
    let zero = t.model.zero();
    t.holds("0 ⊥ E", models::is_orthogonal(&zero, &e)?);
    let sum = models::ortho_sum(&e, &zero)?;
    t.at_most("E+0 = E", models::event_distance(&sum, &e)?, t.tol);
    Ok(())
}

/// Complement from the eigenvectors of `P` below ½, or the set complement.
fn complement_from_spectrum(e: &Event) -> Result<Event> {
    let m = e.model();
    match e.indices() {
        Some(members) => Event::from_indices(m, (0..m.size()).filter(|i| !members.contains(i))),
        None => {
            let (values, vectors) = linalg::eigh(e.projection().expect("quantum event"));
            let kernel: Vec<CVector> = (0..m.size())
                .filter(|&i| values[i] < 0.5)
                .map(|i| vectors.column(i).into_owned())
                .collect();
            Event::from_span(m, &kernel)
        }
    }
}

fn os5(t: &mut Trial) -> Result<()> {
    let e = edge_event(t, 0);
    rec_event(t, "E", &e);
    let c = models::complement(&e);
    let one = t.model.one();
    t.holds("E ⊥ E′", models::is_orthogonal(&e, &c)?);
    t.at_most("E+E′ = 𝟙", models::event_distance(&models::ortho_sum(&e, &c)?, &one)?, t.tol);
    t.at_most("E′ = spectral complement", models::event_distance(&c, &complement_from_spectrum(&e)?)?, 10.0 * t.tol);
    t.at_most("E″ = E", models::event_distance(&models::complement(&c), &e)?, t.tol);

    // any G ≺ E′ has G ⊥ E; E+G = 𝟙 forces G = E′
    let g = gen::sub_event(&mut t.rng, &c);
    rec_event(t, "G", &g);
    let completes = models::events_equal(&models::ortho_sum(&e, &g)?, &one)?;
    t.holds("E+G = 𝟙 ⇔ G = E′", completes == models::events_equal(&g, &c)?);

    t.holds("E ⊥ E ⇔ E = 0", models::is_orthogonal(&e, &e)? == e.is_zero());
    t.holds("E ⊥ 𝟙 ⇔ E = 0", models::is_orthogonal(&e, &one)? == e.is_zero());
    t.at_most("0′ = 𝟙", models::event_distance(&models::complement(&t.model.zero()), &one)?, 0.0);
    Ok(())
}

/// Distance of `F − E` from being a projection orthogonal to `E`, i.e.
/// from being the `D` in `E + D = F`.
fn sum_defect(e: &Event, f: &Event) -> f64 {
    match (e.bits(), f.bits()) {
        (Some(a), Some(b)) => {
            if a & !b == 0 {
                0.0
            } else {
                1.0
            }
        }
        _ => {
            let p = e.projection().expect("quantum event");
            let d: CMatrix = f.projection().expect("quantum event") - p;
            linalg::spectral_norm(&(&d * &d - &d)).max(linalg::spectral_norm(&(p * &d)))
        }
    }
}

fn os6(t: &mut Trial) -> Result<()> {
    let f = edge_event(t, 0);
    let e = if t.index.is_multiple_of(2) { gen::sub_event(&mut t.rng, &f) } else { gen::event(&mut t.rng, t.model) };
    rec_event(t, "E", &e);
    rec_event(t, "F", &f);
    let precedes = models::precedes(&e, &f)?;
    match models::difference(&e, &f)? {
        Some(d) => {
            t.holds("E ≺ F", precedes);
            t.holds("E ⊥ D", models::is_orthogonal(&e, &d)?);
            t.at_most("E+D = F", models::event_distance(&models::ortho_sum(&e, &d)?, &f)?, 10.0 * t.tol);
            t.at_most("D is a projection", idempotency_defect(&d), 10.0 * t.tol);
        }
        None => {
            t.holds("E ⊀ F", !precedes);
            // the only candidate D = F − E must fail
            t.exceeds("no D with E+D = F", sum_defect(&e, &f), t.tol);
        }
    }
    t.holds("E ≺ E", models::precedes(&e, &e)?);
    t.holds("0 ≺ E ≺ 𝟙", models::precedes(&t.model.zero(), &e)? && models::precedes(&e, &t.model.one())?);
    if precedes && models::precedes(&f, &e)? {
        t.at_most("E ≺ F ≺ E ⇒ E = F", models::event_distance(&e, &f)?, 10.0 * t.tol);
    }
    Ok(())
}

// States and conditioning

fn uc1(t: &mut Trial) -> Result<()> {
    let (e, f) = match t.index {
        0 => (t.model.zero(), t.model.one()),
        1 => {
            let e = gen::rank_one_event(&mut t.rng, t.model);
            let f = models::complement(&e);
            (e, f)
        }
        _ => {
            let e = gen::event(&mut t.rng, t.model);
            let f = gen::event(&mut t.rng, t.model);
            if models::events_equal(&e, &f)? {
                let f = models::complement(&e);
                (e, f)
            } else {
                (e, f)
            }
        }
    };
    rec_event(t, "E", &e);
    rec_event(t, "F", &f);
    let mu = states::separating_state(&e, &f)?;
    rec_state(t, "mu", &mu);
    let gap = (states::evaluate(&mu, &e)? - states::evaluate(&mu, &f)?).abs();
    t.exceeds("|μ(E) − μ(F)|", gap, t.tol);
    t.holds("equal events are not separated", matches!(states::separating_state(&e, &e), Err(Error::EventsEqual)));
    Ok(())
}

fn uc2(t: &mut Trial) -> Result<()> {
    let e = match t.index {
        0 => t.model.one(),
        1 => gen::rank_one_event(&mut t.rng, t.model),
        _ => gen::nonzero_event(&mut t.rng, t.model),
    };
    let mu = nonzero_state(t, &e)?;
    let f = gen::sub_event(&mut t.rng, &e);
    rec_event(t, "E", &e);
    rec_event(t, "F", &f);
    rec_state(t, "mu", &mu);
    let p = states::evaluate(&mu, &e)?;
    let mu_e = states::conditional(&mu, &e)?;
    let contract = (states::evaluate(&mu_e, &f)? * p - states::evaluate(&mu, &f)?).abs();
    t.at_most("|μ_E(F)μ(E) − μ(F)|", contract, 10.0 * t.tol);
    t.at_most("μ_E(E) = 1", (states::evaluate(&mu_e, &e)? - 1.0).abs(), 10.0 * t.tol);
    t.at_most("μ(F) ≤ μ(E)", states::evaluate(&mu, &f)? - p, t.tol);

    let k = 3;
    let family = gen::orthogonal_family(&mut t.rng, t.model, k);
    let mut total = t.model.zero();
    let mut sum = 0.0;
    for g in &family {
        total = models::ortho_sum(&total, g)?;
        sum += states::evaluate(&mu_e, g)?;
    }
    t.at_most("μ_E additive", (states::evaluate(&mu_e, &total)? - sum).abs(), k as f64 * t.tol);

    let probe_seed = t.rng.random();
    let unique = states::conditional_uniqueness_probe(&mu, &e, 8, probe_seed)?;
    t.holds("conditional is unique", unique);

    let null = states::conditional(&mu, &t.model.zero());
    t.holds("conditioning on 0 is refused", matches!(null, Err(Error::ConditioningOnNull { .. })));
    Ok(())
}

// Axioms

fn a1(t: &mut Trial) -> Result<()> {
    let e = edge_event(t, 0);
    let f = edge_event(t, 1);
    let mu = gen::state(&mut t.rng, t.model);
    rec_event(t, "E", &e);
    rec_event(t, "F", &f);
    rec_state(t, "mu", &mu);
    t.at_most("A1 residual", jordan::a1_residual(&mu, &e, &f)?, 10.0 * t.tol);
    t.at_most("EFE + E′F′E′ = FEF + F′E′F′", jordan::a1_operator_residual(&e, &f)?, t.tol);
    Ok(())
}

fn a2(t: &mut Trial) -> Result<()> {
    let e = edge_event(t, 0);
    let f = edge_event(t, 1);
    let mu = gen::state(&mut t.rng, t.model);
    rec_event(t, "E", &e);
    rec_event(t, "F", &f);
    rec_state(t, "mu", &mu);
    let u = jordan::u_map(&e, &f)?;
    let p = states::evaluate(&mu, &e)?;
    let expected = if p > states::CONDITIONING_THRESHOLD {
        states::evaluate(&states::conditional(&mu, &e)?, &f)? * p
    } else {
        0.0
    };
    t.at_most("|Exp_μ(U_E(F)) − μ(F|E)μ(E)|", (obs::expectation(&mu, &u)? - expected).abs(), 10.0 * t.tol);

    let ef_e = e.to_matrix() * f.to_matrix() * e.to_matrix();
    t.at_most("U_E(F) = EFE", linalg::spectral_norm(&(u.operator() - ef_e)), t.tol);

    let chi_e = obs::indicator(&e);
    let one = t.model.one();
    t.at_most("U_E(E) = χ_E", dist(&jordan::u_map(&e, &e)?, &chi_e)?, t.tol);
    t.at_most("U_E(𝟙) = χ_E", dist(&jordan::u_map(&e, &one)?, &chi_e)?, t.tol);
    t.at_most("U_𝟙(E) = χ_E", dist(&jordan::u_map(&one, &e)?, &chi_e)?, t.tol);
    let g = gen::sub_event(&mut t.rng, &models::complement(&e));
    t.at_most("U_E(F) = 0 for E ⊥ F", obs::norm(&jordan::u_map(&e, &g)?), t.tol);
    Ok(())
}

fn a3(t: &mut Trial) -> Result<()> {
    let x = edge_observable(t, 0, 1.0);
    let y = edge_observable(t, 1, 1.0);
    let z = gen::observable(&mut t.rng, t.model, 1.0);
    let mu = gen::state(&mut t.rng, t.model);
    rec_obs(t, "X", &x);
    rec_obs(t, "Y", &y);
    rec_state(t, "mu", &mu);
    let xy = obs::add(&x, &y)?;
    let additivity = obs::expectation(&mu, &xy)? - obs::expectation(&mu, &x)? - obs::expectation(&mu, &y)?;
    t.at_most("|Exp(X+Y) − Exp X − Exp Y|", additivity.abs(), 10.0 * t.tol);
    t.at_most("X+Y = Y+X", dist(&xy, &obs::add(&y, &x)?)?, t.tol);
    let left = obs::add(&xy, &z)?;
    let right = obs::add(&x, &obs::add(&y, &z)?)?;
    t.at_most("(X+Y)+Z = X+(Y+Z)", dist(&left, &right)?, 10.0 * t.tol);
    t.at_most("X+0 = X", dist(&obs::add(&x, &PrimitiveObservable::zero(t.model))?, &x)?, t.tol);

    let seed = t.rng.random();
    let separated = super::expectation_separation_check(&x, &y, 20, seed)?;
    t.holds("Exp separates X and Y", separated);

    // shift one eigenvalue by δ
    let delta = t.rng.random_range(1e-3..0.5);
    let mut terms: Vec<(f64, Event)> = x.terms().iter().map(|s| (s.value, s.event.clone())).collect();
    let j = t.rng.random_range(0..terms.len());
    terms[j].0 += delta;
    let shifted = PrimitiveObservable::from_terms(t.model, terms)?;
    let (_, gap) = super::separating_state_for(&x, &shifted)?;
    t.at_most("separation gap ≥ δ", delta - gap, t.tol);

    let fam = gen::orthogonal_family(&mut t.rng, t.model, 2);
    let sum = obs::add(&obs::indicator(&fam[0]), &obs::indicator(&fam[1]))?;
    t.at_most("χ_{E+F} = χ_E + χ_F", dist(&sum, &obs::indicator(&models::ortho_sum(&fam[0], &fam[1])?))?, t.tol);

    let g = gen::function(&mut t.rng);
    let f = gen::function(&mut t.rng);
    let h = {
        let (g, f) = (g.clone(), f.clone());
        move |s: f64| g(s) + f(s)
    };
    let hx = obs::functional_calculus(&x, h);
    let gf = obs::add(&obs::functional_calculus(&x, g), &obs::functional_calculus(&x, f))?;
    t.at_most("h(X) = g(X) + f(X)", dist(&hx, &gf)?, 10.0 * t.tol);
    Ok(())
}

// Norm and approximation

const STATES_PER_OBSERVABLE: usize = 1000;

/// Pure state on the eigen-event carrying the largest |value|.
fn certifying_state(x: &PrimitiveObservable) -> Result<State> {
    let top = x
        .terms()
        .iter()
        .max_by(|a, b| a.value.abs().total_cmp(&b.value.abs()))
        .expect("observables have at least one term");
    gen::state_on(&top.event)
}

fn l51_i(t: &mut Trial) -> Result<()> {
    let x = edge_observable(t, 0, 2.0);
    rec_obs(t, "X", &x);
    let norm = obs::norm(&x);
    let cert = obs::expectation(&certifying_state(&x)?, &x)?.abs();
    let mut best = cert;
    let mut over: f64 = 0.0;
    for _ in 0..STATES_PER_OBSERVABLE {
        let mu = gen::state(&mut t.rng, t.model);
        let v = obs::expectation(&mu, &x)?.abs();
        best = best.max(v);
        over = over.max(v - norm);
    }
    t.at_most("|Exp_μ(X)| ≤ ‖X‖", over.max(cert - norm), t.tol);
    t.at_most("‖X‖ − sup |Exp_μ(X)|", norm - best, 10.0 * t.tol);
    Ok(())
}

fn l51_ii(t: &mut Trial) -> Result<()> {
    let x = edge_observable(t, 0, 2.0);
    let y = edge_observable(t, 1, 2.0);
    rec_obs(t, "X", &x);
    rec_obs(t, "Y", &y);
    let triangle = obs::norm(&obs::add(&x, &y)?) - obs::norm(&x) - obs::norm(&y);
    t.at_most("‖X+Y‖ ≤ ‖X‖ + ‖Y‖", triangle, t.tol);
    let x2 = obs::square(&x);
    let y2 = obs::square(&y);
    let squares = obs::norm(&x2) - obs::norm(&obs::add(&x2, &y2)?);
    t.at_most("‖X²‖ ≤ ‖X² + Y²‖", squares, t.tol);
    let s = t.rng.random_range(-3.0..3.0);
    t.at_most("‖sX‖ = |s|‖X‖", (obs::norm(&obs::scale(s, &x)) - s.abs() * obs::norm(&x)).abs(), t.tol);
    Ok(())
}

pub(crate) const STEP_LEVELS: [u32; 9] = [1, 2, 4, 8, 16, 32, 64, 128, 256];

/// `sup |f_n(s) − s|` over `[−r, r]`, from the value the step function
/// takes on each of its cells.
pub(crate) fn uniform_step_error(r: f64, n: u32) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let f = obs::step_function(r, n);
    let width = r / n as f64;
    let cells = 2 * n as i64;
    (0..cells)
        .map(|k| {
            let a = -r + k as f64 * width;
            let b = (a + width).min(r);
            let v = f(0.5 * (a + b));
            (v - a).abs().max((v - b).abs())
        })
        .fold(0.0, f64::max)
}

fn l52_i(t: &mut Trial) -> Result<()> {
    let x = edge_observable(t, 0, 2.0);
    rec_obs(t, "X", &x);
    let r = obs::norm(&x);
    let mut previous = f64::INFINITY;
    for n in STEP_LEVELS {
        let err = dist(&x, &obs::step_approximate(&x, n))?;
        t.at_most(format!("‖X − f_{n}(X)‖ ≤ r/n"), err - r / n as f64, t.tol);
        let uniform = uniform_step_error(r, n);
        t.at_most(format!("‖X − f_{n}(X)‖ ≤ sup|f_{n} − id|"), err - uniform, t.tol);
        if r > 0.0 {
            t.exceeds(format!("sup|f_{n} − id| decreases"), previous - uniform, 0.0);
        }
        previous = uniform;
    }
    Ok(())
}

fn l52_ii(t: &mut Trial) -> Result<()> {
    let x = edge_observable(t, 0, 1.0);
    rec_obs(t, "X", &x);
    let terms = obs::convex_decompose(&x)?;
    let weight: f64 = terms.iter().map(|c| c.weight).sum();
    t.holds("weights are nonnegative", terms.iter().all(|c| c.weight >= 0.0));
    t.at_most("|Σλ − 1|", (weight - 1.0).abs(), t.tol);
    let back = obs::reconstruct(t.model, &terms)?;
    t.at_most("‖Σ λ(χ_E − χ_F) − X‖", dist(&back, &x)?, terms.len().max(1) as f64 * t.tol);

    let e = gen::event(&mut t.rng, t.model);
    let f = gen::event(&mut t.rng, t.model);
    let diff = obs::subtract(&obs::indicator(&e), &obs::indicator(&f))?;
    t.at_most("‖χ_E − χ_F‖ ≤ 1", obs::norm(&diff) - 1.0, t.tol);

    if obs::norm(&x) > 0.5 {
        let too_big = obs::convex_decompose(&obs::scale(3.0, &x));
        t.holds("‖X‖ > 1 is refused", matches!(too_big, Err(Error::NormExceedsOne { .. })));
    }
    Ok(())
}

// Products

fn t61_i(t: &mut Trial) -> Result<()> {
    let x = edge_observable(t, 0, 1.0);
    let y = edge_observable(t, 1, 1.0);
    let z = gen::observable(&mut t.rng, t.model, 1.0);
    let s = t.rng.random_range(-1.0..1.0);
    let u = t.rng.random_range(-1.0..1.0);
    rec_obs(t, "X", &x);
    rec_obs(t, "Y", &y);
    rec_obs(t, "Z", &z);
    t.record("s", || json!(s));
    t.record("t", || json!(u));

    let xy = jordan::jordan_product(&x, &y)?;
    let xz = jordan::jordan_product(&x, &z)?;
    let combo = obs::add(&obs::scale(s, &y), &obs::scale(u, &z))?;
    let left = jordan::jordan_product(&x, &combo)?;
    let right = obs::add(&obs::scale(s, &xy), &obs::scale(u, &xz))?;
    t.at_most("X∘(sY+tZ) = s X∘Y + t X∘Z", dist(&left, &right)?, 1e2 * t.tol);
    t.at_most("X∘Y = Y∘X", dist(&xy, &jordan::jordan_product(&y, &x)?)?, 1e2 * t.tol);
    let unit = PrimitiveObservable::unit(t.model);
    t.at_most("X∘𝟙 = X", dist(&jordan::jordan_product(&x, &unit)?, &x)?, 10.0 * t.tol);
    t.at_most("𝟙∘X = X", dist(&jordan::jordan_product(&unit, &x)?, &x)?, 10.0 * t.tol);

    let (_, trace) = jordan::product(&x, &y, ProductPath::Both)?;
    let discrepancy = trace.and_then(|tr| tr.discrepancy).unwrap_or(f64::INFINITY);
    t.at_most("U-extension vs polarization", discrepancy, 1e3 * t.tol);

    let oracle = gen::symmetrized(&x.operator(), &y.operator());
    t.at_most("A(X∘Y) = ½(AB+BA)", linalg::spectral_norm(&(xy.operator() - oracle)), 1e2 * t.tol);

    let refined = gen::refine(&mut t.rng, &x);
    let split = jordan::combination_product(&refined, &y)?;
    t.at_most("independent of the representation of X", dist(&split, &xy)?, 1e2 * t.tol);
    Ok(())
}

fn t61_ii(t: &mut Trial) -> Result<()> {
    let x = edge_observable(t, 0, 2.0);
    let y = edge_observable(t, 1, 2.0);
    let mu = gen::state(&mut t.rng, t.model);
    rec_obs(t, "X", &x);
    rec_obs(t, "Y", &y);
    rec_state(t, "mu", &mu);
    let xy = jordan::jordan_product(&x, &y)?;
    let (nx, ny) = (obs::norm(&x), obs::norm(&y));
    t.at_most("‖X∘Y‖ ≤ ‖X‖‖Y‖", obs::norm(&xy) - nx * ny, t.tol);

    let xx = jordan::jordan_product(&x, &x)?;
    let yy = jordan::jordan_product(&y, &y)?;
    let exp_xx = obs::expectation(&mu, &xx)?;
    t.at_most("Exp_μ(X∘X) ≥ 0", -exp_xx, t.tol);
    let cs = obs::expectation(&mu, &xy)?.powi(2) - exp_xx * obs::expectation(&mu, &yy)?;
    t.at_most("Exp(X∘Y)² ≤ Exp(X∘X) Exp(Y∘Y)", cs, 10.0 * t.tol * (1.0 + nx * ny).powi(2));

    let e = gen::event(&mut t.rng, t.model);
    rec_event(t, "E", &e);
    t.at_most("‖Ũ_E(Y)‖ ≤ ‖Y‖", obs::norm(&jordan::u_extend(&e, &y)?) - ny, t.tol);
    t.at_most("‖χ_E∘Y‖ ≤ ‖Y‖", obs::norm(&jordan::indicator_product(&e, &y)?) - ny, t.tol);
    Ok(())
}

fn t61_iii(t: &mut Trial) -> Result<()> {
    let e = edge_event(t, 0);
    let f = gen::sub_event(&mut t.rng, &models::complement(&e));
    let x = edge_observable(t, 1, 2.0);
    rec_event(t, "E", &e);
    rec_event(t, "F", &f);
    rec_obs(t, "X", &x);
    let chi_e = obs::indicator(&e);
    let chi_f = obs::indicator(&f);
    t.at_most("χ_E∘χ_E = χ_E", dist(&jordan::jordan_product(&chi_e, &chi_e)?, &chi_e)?, 10.0 * t.tol);
    t.at_most("χ_E∘χ_F = 0 for E ⊥ F", obs::norm(&jordan::jordan_product(&chi_e, &chi_f)?), 10.0 * t.tol);
    t.at_most("X∘X = X²", dist(&jordan::jordan_product(&x, &x)?, &obs::square(&x))?, 1e2 * t.tol);

    let g = gen::function(&mut t.rng);
    let h = gen::function(&mut t.rng);
    let gh = {
        let (g, h) = (g.clone(), h.clone());
        move |s: f64| g(s) * h(s)
    };
    let prod = jordan::jordan_product(&obs::functional_calculus(&x, g), &obs::functional_calculus(&x, h))?;
    t.at_most("g(X)∘h(X) = (gh)(X)", dist(&prod, &obs::functional_calculus(&x, gh))?, 1e2 * t.tol);

    let zero = PrimitiveObservable::zero(t.model);
    let unit = PrimitiveObservable::unit(t.model);
    t.at_most("χ_E∘0 = 0", obs::norm(&jordan::indicator_product(&e, &zero)?), t.tol);
    t.at_most("χ_E∘𝟙 = χ_E", dist(&jordan::indicator_product(&e, &unit)?, &chi_e)?, 10.0 * t.tol);
    Ok(())
}

fn l71(t: &mut Trial) -> Result<()> {
    let fam = gen::orthogonal_family(&mut t.rng, t.model, 2);
    let y = edge_observable(t, 1, 1.0);
    rec_event(t, "E", &fam[0]);
    rec_event(t, "F", &fam[1]);
    rec_obs(t, "Y", &y);
    t.at_most("χ_E∘(χ_F∘Y) = χ_F∘(χ_E∘Y)", jordan::operator_commute_check(&fam[0], &fam[1], &y)?, 1e2 * t.tol);
    Ok(())
}

fn t72(t: &mut Trial) -> Result<()> {
    let x = edge_observable(t, 0, 1.0);
    let y = edge_observable(t, 1, 1.0);
    rec_obs(t, "X", &x);
    rec_obs(t, "Y", &y);
    t.at_most("X∘(X²∘Y) = X²∘(X∘Y)", jordan::jordan_identity_residual(&x, &y)?, 1e3 * t.tol);
    Ok(())
}

// Classical versus quantum

fn assoc_classical(t: &mut Trial) -> Result<()> {
    debug_assert_eq!(t.model.kind(), ModelKind::Classical);
    let x = edge_observable(t, 0, 1.0);
    let y = edge_observable(t, 1, 1.0);
    let z = gen::observable(&mut t.rng, t.model, 1.0);
    rec_obs(t, "X", &x);
    rec_obs(t, "Y", &y);
    rec_obs(t, "Z", &z);
    t.at_most("(X∘Y)∘Z = X∘(Y∘Z)", jordan::associativity_residual(&x, &y, &z)?, t.tol);

    let e = gen::event(&mut t.rng, t.model);
    let f = gen::event(&mut t.rng, t.model);
    let meet = Event::from_bits(t.model, e.bits().unwrap_or(0) & f.bits().unwrap_or(0))?;
    let prod = jordan::jordan_product(&obs::indicator(&e), &obs::indicator(&f))?;
    t.at_most("χ_E∘χ_F = χ_{E∩F}", dist(&prod, &obs::indicator(&meet))?, 0.0);
    Ok(())
}

fn nonassoc_quantum(t: &mut Trial) -> Result<()> {
    let (p, q, r) = if t.index == 0 {
        let p = gen::basis_projection(t.model, 0);
        (p.clone(), p, gen::diagonal_projection(t.model))
    } else {
        (
            gen::rank_one_event(&mut t.rng, t.model),
            gen::rank_one_event(&mut t.rng, t.model),
            gen::rank_one_event(&mut t.rng, t.model),
        )
    };
    rec_event(t, "P1", &p);
    rec_event(t, "P2", &q);
    rec_event(t, "P3", &r);
    let residual = jordan::associativity_residual(&obs::indicator(&p), &obs::indicator(&q), &obs::indicator(&r))?;
    t.exceeds("(χ1∘χ2)∘χ3 − χ1∘(χ2∘χ3)", residual, super::WITNESS_THRESHOLD);
    Ok(())
}
