//! The Jordan product on bounded real observables, built from the maps
//! `U_E` whose expectations are the unnormalized conditional probabilities
//! `μ(F|E)μ(E)`.
//!
//! Construction:
//!
//! * `Ũ_E(Y) = Σ s_l U_E(F_l)` for `Y = Σ s_l χ_{F_l}`,
//! * `χ_E ∘ Y = ½ (Y + Ũ_E(Y) − Ũ_{E′}(Y))`,
//! * `X ∘ Y = Σ t_j (χ_{E_j} ∘ Y)` for `X = Σ t_j χ_{E_j}`.
//!
//! The polarization formula `X ∘ Y = ½((X+Y)² − X² − Y²)` gives a second,
//! independent route used for cross-checking.
//!
//! Intermediate sums are carried as realizations (value functions or
//! operators); spectral form is recovered once per public operation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::models::{self, Event, EventPayload};
use crate::observables::{self, cluster_threshold, PrimitiveObservable, Realization};
use crate::states::{self, State, CONDITIONING_THRESHOLD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductPath {
    UExtension,
    Polarization,
    Both,
}

/// Record of a product evaluation. `discrepancy` is the norm distance
/// between the two routes when both were evaluated.
#[derive(Clone, Debug)]
pub struct ProductTrace {
    pub path: ProductPath,
    pub operands: (PrimitiveObservable, PrimitiveObservable),
    pub result: PrimitiveObservable,
    pub discrepancy: Option<f64>,
}

fn check_models(a: crate::Model, b: crate::Model) -> Result<()> {
    if a != b {
        return Err(Error::ModelMismatch);
    }
    Ok(())
}

fn to_observable(r: Realization, model: crate::Model) -> PrimitiveObservable {
    let scale = r.norm();
    r.into_observable(model, cluster_threshold(model.kind(), scale))
}

/// Realization of `U_E(F)`: `χ_{E∩F}` or the operator `EFE`.
fn u_map_realization(e: &Event, f: &Event) -> Realization {
    match (e.payload(), f.payload()) {
        (EventPayload::Classical(a), EventPayload::Classical(b)) => {
            let both = a & b;
            Realization::Values(
                (0..e.model().size())
                    .map(|i| if both >> i & 1 == 1 { 1.0 } else { 0.0 })
                    .collect(),
            )
        }
        (EventPayload::Quantum(p), EventPayload::Quantum(q)) => {
            Realization::Operator(linalg::hermitize(&(p * q * p)))
        }
        _ => unreachable!("payload kind follows the model"),
    }
}

/// `U_E(F)`, the observable with `Exp_μ(U_E(F)) = μ(F|E)μ(E)`.
pub fn u_map(e: &Event, f: &Event) -> Result<PrimitiveObservable> {
    check_models(e.model(), f.model())?;
    Ok(to_observable(u_map_realization(e, f), e.model()))
}

fn u_extend_realization<'a>(e: &Event, terms: impl IntoIterator<Item = (f64, &'a Event)>) -> Realization {
    let mut acc = Realization::zero(e.model());
    for (s, f) in terms {
        if s != 0.0 {
            acc.axpy(s, &u_map_realization(e, f));
        }
    }
    acc
}

fn spectral_terms(y: &PrimitiveObservable) -> impl Iterator<Item = (f64, &Event)> {
    y.terms().iter().map(|t| (t.value, &t.event))
}

/// `Ũ_E(Y)`, the linear extension of `U_E` over the spectral terms of `Y`.
pub fn u_extend(e: &Event, y: &PrimitiveObservable) -> Result<PrimitiveObservable> {
    check_models(e.model(), y.model())?;
    Ok(to_observable(u_extend_realization(e, spectral_terms(y)), e.model()))
}

fn indicator_product_realization(e: &Event, y: &PrimitiveObservable, y_real: &Realization) -> Realization {
    let ec = models::complement(e);
    let mut acc = y_real.clone();
    acc.axpy(1.0, &u_extend_realization(e, spectral_terms(y)));
    acc.axpy(-1.0, &u_extend_realization(&ec, spectral_terms(y)));
    acc.scaled(0.5)
}

/// `χ_E ∘ Y = ½ (Y + Ũ_E(Y) − Ũ_{E′}(Y))`.
pub fn indicator_product(e: &Event, y: &PrimitiveObservable) -> Result<PrimitiveObservable> {
    check_models(e.model(), y.model())?;
    let r = indicator_product_realization(e, y, &y.realization());
    Ok(to_observable(r, e.model()))
}

fn combination_product_realization(x_terms: &[(f64, Event)], y: &PrimitiveObservable) -> Realization {
    let y_real = y.realization();
    let mut acc = Realization::zero(y.model());
    for (t, e) in x_terms {
        if *t != 0.0 {
            acc.axpy(*t, &indicator_product_realization(e, y, &y_real));
        }
    }
    acc
}

/// `Σ t_j (χ_{E_j} ∘ Y)` for an arbitrary linear combination of
/// indicators on the left. The result does not depend on which
/// combination represents the left factor.
pub fn combination_product(x_terms: &[(f64, Event)], y: &PrimitiveObservable) -> Result<PrimitiveObservable> {
    for (_, e) in x_terms {
        check_models(e.model(), y.model())?;
    }
    Ok(to_observable(combination_product_realization(x_terms, y), y.model()))
}

fn u_extension_product(x: &PrimitiveObservable, y: &PrimitiveObservable) -> PrimitiveObservable {
    let terms: Vec<(f64, Event)> = x.terms().iter().map(|t| (t.value, t.event.clone())).collect();
    to_observable(combination_product_realization(&terms, y), x.model())
}

/// `½((X+Y)² − X² − Y²)`.
pub fn polarization_product(x: &PrimitiveObservable, y: &PrimitiveObservable) -> Result<PrimitiveObservable> {
    check_models(x.model(), y.model())?;
    let sum_sq = observables::square(&observables::add(x, y)?);
    let diff = observables::subtract(&observables::subtract(&sum_sq, &observables::square(x))?, &observables::square(y))?;
    Ok(observables::scale(0.5, &diff))
}

/// `X ∘ Y` along the constructive route.
pub fn jordan_product(x: &PrimitiveObservable, y: &PrimitiveObservable) -> Result<PrimitiveObservable> {
    check_models(x.model(), y.model())?;
    Ok(u_extension_product(x, y))
}

/// `X ∘ Y` along the requested route. With [`ProductPath::Both`] the
/// constructive result is returned together with a trace recording the
/// distance to the polarization result.
pub fn product(
    x: &PrimitiveObservable,
    y: &PrimitiveObservable,
    path: ProductPath,
) -> Result<(PrimitiveObservable, Option<ProductTrace>)> {
    check_models(x.model(), y.model())?;
    match path {
        ProductPath::UExtension => Ok((u_extension_product(x, y), None)),
        ProductPath::Polarization => Ok((polarization_product(x, y)?, None)),
        ProductPath::Both => {
            let result = u_extension_product(x, y);
            let other = polarization_product(x, y)?;
            let discrepancy = observables::distance(&result, &other)?;
            let trace = ProductTrace {
                path,
                operands: (x.clone(), y.clone()),
                result: result.clone(),
                discrepancy: Some(discrepancy),
            };
            Ok((result, Some(trace)))
        }
    }
}

/// `‖χ_E ∘ (χ_F ∘ Y) − χ_F ∘ (χ_E ∘ Y)‖` for orthogonal `E`, `F`.
pub fn operator_commute_check(e: &Event, f: &Event, y: &PrimitiveObservable) -> Result<f64> {
    let overlap = models::overlap(e, f)?;
    if overlap > e.model().tolerance() {
        return Err(Error::NotOrthogonal { overlap });
    }
    operator_commute_residual(e, f, y)
}

/// Same quantity as [`operator_commute_check`] without the orthogonality
/// precondition.
pub fn operator_commute_residual(e: &Event, f: &Event, y: &PrimitiveObservable) -> Result<f64> {
    check_models(e.model(), f.model())?;
    let left = indicator_product(e, &indicator_product(f, y)?)?;
    let right = indicator_product(f, &indicator_product(e, y)?)?;
    observables::distance(&left, &right)
}

/// `‖X ∘ (X² ∘ Y) − X² ∘ (X ∘ Y)‖`.
pub fn jordan_identity_residual(x: &PrimitiveObservable, y: &PrimitiveObservable) -> Result<f64> {
    check_models(x.model(), y.model())?;
    let x2 = observables::square(x);
    let left = jordan_product(x, &jordan_product(&x2, y)?)?;
    let right = jordan_product(&x2, &jordan_product(x, y)?)?;
    observables::distance(&left, &right)
}

/// `‖(X ∘ Y) ∘ Z − X ∘ (Y ∘ Z)‖`.
pub fn associativity_residual(
    x: &PrimitiveObservable,
    y: &PrimitiveObservable,
    z: &PrimitiveObservable,
) -> Result<f64> {
    check_models(x.model(), y.model())?;
    check_models(x.model(), z.model())?;
    let left = jordan_product(&jordan_product(x, y)?, z)?;
    let right = jordan_product(x, &jordan_product(y, z)?)?;
    observables::distance(&left, &right)
}

/// `μ(target | given) μ(given)`. Falls back to `Exp_μ(U_given(target))`
/// when `μ(given)` is too small to condition on.
pub fn joint_probability(mu: &State, given: &Event, target: &Event) -> Result<f64> {
    let p = states::evaluate(mu, given)?;
    check_models(given.model(), target.model())?;
    if p > CONDITIONING_THRESHOLD {
        Ok(states::evaluate(&states::conditional(mu, given)?, target)? * p)
    } else {
        observables::expectation(mu, &u_map(given, target)?)
    }
}

/// `|μ(E|F)μ(F) + μ(E′|F′)μ(F′) − μ(F|E)μ(E) − μ(F′|E′)μ(E′)|`.
pub fn a1_residual(mu: &State, e: &Event, f: &Event) -> Result<f64> {
    check_models(mu.model(), e.model())?;
    check_models(e.model(), f.model())?;
    let ec = models::complement(e);
    let fc = models::complement(f);
    let lhs = joint_probability(mu, f, e)? + joint_probability(mu, &fc, &ec)?;
    let rhs = joint_probability(mu, e, f)? + joint_probability(mu, &ec, &fc)?;
    Ok((lhs - rhs).abs())
}

/// `‖U_E(F) + U_{E′}(F′) − U_F(E) − U_{F′}(E′)‖`, the operator form of the
/// symmetry above.
pub fn a1_operator_residual(e: &Event, f: &Event) -> Result<f64> {
    check_models(e.model(), f.model())?;
    let ec = models::complement(e);
    let fc = models::complement(f);
    let mut r = u_map_realization(e, f);
    r.axpy(1.0, &u_map_realization(&ec, &fc));
    r.axpy(-1.0, &u_map_realization(f, e));
    r.axpy(-1.0, &u_map_realization(&fc, &ec));
    Ok(r.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, CMatrix, CVector};
    use crate::models::{complement, random_event, Model};
    use crate::observables::{distance, indicator, random_observable, square};
    use crate::states::random_state;

    fn qubit() -> Model {
        Model::quantum(2).unwrap()
    }

    fn basis(model: Model, i: usize) -> Event {
        let mut v = CVector::zeros(model.size());
        v[i] = c64(1.0, 0.0);
        Event::from_span(model, &[v]).unwrap()
    }

    fn plus(model: Model) -> Event {
        Event::from_span(model, &[CVector::from_vec(vec![c64(1.0, 0.0), c64(1.0, 0.0)])]).unwrap()
    }

    // Hilbert-model oracle, computed from the operators directly.
    fn symmetrized(a: &CMatrix, b: &CMatrix) -> CMatrix {
        (a * b + b * a).scale(0.5)
    }

    #[test]
    fn u_map_identities() {
        let q = Model::quantum(3).unwrap();
        let e = random_event(q, 2, 1).unwrap();
        let f = random_event(q, 1, 2).unwrap();
        assert!(distance(&u_map(&q.one(), &f).unwrap(), &indicator(&f)).unwrap() < 1e-12);
        assert!(distance(&u_map(&e, &e).unwrap(), &indicator(&e)).unwrap() < 1e-12);
        assert!(distance(&u_map(&e, &q.one()).unwrap(), &indicator(&e)).unwrap() < 1e-12);
        let ec = complement(&e);
        let zero = u_map(&e, &ec).unwrap();
        assert_eq!(zero.terms().len(), 1);
        assert!(observables::norm(&zero) < 1e-15);
    }

    #[test]
    fn u_map_on_qubit() {
        let q = qubit();
        let u = u_map(&basis(q, 0), &plus(q)).unwrap();
        assert_eq!(u.terms().len(), 2);
        assert!(u.terms()[0].value.abs() < 1e-15);
        assert!((u.terms()[1].value - 0.5).abs() < 1e-15);
        assert!(models::events_equal(&u.terms()[1].event, &basis(q, 0)).unwrap());
        assert!(models::events_equal(&u.terms()[0].event, &basis(q, 1)).unwrap());
    }

    #[test]
    fn u_map_matches_conditional_probability() {
        for model in [Model::classical(5).unwrap(), Model::quantum(4).unwrap()] {
            for seed in 0..10 {
                let mu = random_state(model, seed);
                let e = random_event(model, 1 + seed as usize % 3, seed + 50).unwrap();
                let f = random_event(model, 2, seed + 80).unwrap();
                let lhs = observables::expectation(&mu, &u_map(&e, &f).unwrap()).unwrap();
                let p = states::evaluate(&mu, &e).unwrap();
                let rhs = states::evaluate(&states::conditional(&mu, &e).unwrap(), &f).unwrap() * p;
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn u_extend_examples() {
        let q = Model::quantum(3).unwrap();
        let e = random_event(q, 2, 4).unwrap();
        let f = random_event(q, 1, 5).unwrap();
        let a = u_extend(&e, &indicator(&f)).unwrap();
        assert!(distance(&a, &u_map(&e, &f).unwrap()).unwrap() < 1e-12);

        let y = random_observable(q, 2.0, 6);
        assert!(distance(&u_extend(&q.one(), &y).unwrap(), &y).unwrap() < 1e-12);

        let p = e.projection().unwrap();
        let expected = p * y.operator() * p;
        let got = u_extend(&e, &y).unwrap().operator();
        assert!(linalg::spectral_norm(&(got - expected)) < 1e-12);
        assert!(observables::norm(&u_extend(&e, &y).unwrap()) <= observables::norm(&y) + 1e-12);
    }

    #[test]
    fn indicator_product_examples() {
        let q = Model::quantum(3).unwrap();
        let e = random_event(q, 1, 7).unwrap();
        let chi = indicator(&e);
        assert!(distance(&indicator_product(&e, &chi).unwrap(), &chi).unwrap() < 1e-12);
        let ec = complement(&e);
        assert!(observables::norm(&indicator_product(&e, &indicator(&ec)).unwrap()) < 1e-12);
        let zero = PrimitiveObservable::zero(q);
        assert!(observables::norm(&indicator_product(&e, &zero).unwrap()) < 1e-15);
        let unit = PrimitiveObservable::unit(q);
        assert!(distance(&indicator_product(&e, &unit).unwrap(), &chi).unwrap() < 1e-12);

        let y = random_observable(q, 1.5, 8);
        let p = e.projection().unwrap();
        let got = indicator_product(&e, &y).unwrap().operator();
        let expected = symmetrized(p, &y.operator());
        assert!(linalg::spectral_norm(&(got - expected)) < 1e-12);
    }

    #[test]
    fn indicator_products_commute() {
        let q = Model::quantum(3).unwrap();
        for seed in 0..10 {
            let e = random_event(q, 1, seed).unwrap();
            let f = random_event(q, 2, seed + 100).unwrap();
            let ef = indicator_product(&e, &indicator(&f)).unwrap();
            let fe = indicator_product(&f, &indicator(&e)).unwrap();
            assert!(distance(&ef, &fe).unwrap() < 1e-12);
        }
    }

    #[test]
    fn product_examples() {
        for model in [Model::classical(4).unwrap(), Model::quantum(3).unwrap()] {
            let x = random_observable(model, 2.0, 3);
            let unit = PrimitiveObservable::unit(model);
            assert!(distance(&jordan_product(&x, &unit).unwrap(), &x).unwrap() < 1e-12);
            let e = random_event(model, 2, 1).unwrap();
            let chi = indicator(&e);
            assert!(distance(&jordan_product(&chi, &chi).unwrap(), &chi).unwrap() < 1e-12);
            assert!(distance(&jordan_product(&x, &x).unwrap(), &square(&x)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn product_matches_symmetrized_operator() {
        let q = Model::quantum(4).unwrap();
        for seed in 0..10 {
            let x = random_observable(q, 2.0, seed);
            let y = random_observable(q, 2.0, seed + 1000);
            let (z, trace) = product(&x, &y, ProductPath::Both).unwrap();
            let expected = symmetrized(&x.operator(), &y.operator());
            assert!(linalg::spectral_norm(&(z.operator() - expected)) < 1e-10);
            assert!(trace.unwrap().discrepancy.unwrap() < 1e-10);
        }
    }

    #[test]
    fn classical_product_is_pointwise() {
        let c = Model::classical(5).unwrap();
        let x = random_observable(c, 2.0, 1);
        let y = random_observable(c, 2.0, 2);
        let z = jordan_product(&x, &y).unwrap().value_function().unwrap();
        let (xv, yv) = (x.value_function().unwrap(), y.value_function().unwrap());
        for i in 0..5 {
            assert!((z[i] - xv[i] * yv[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn commute_check() {
        let q = qubit();
        let y = random_observable(q, 1.0, 2);
        assert_eq!(operator_commute_check(&basis(q, 0), &q.zero(), &y).unwrap(), 0.0);
        assert!(operator_commute_check(&basis(q, 0), &basis(q, 1), &y).unwrap() < 1e-12);
        assert!(matches!(
            operator_commute_check(&basis(q, 0), &plus(q), &y),
            Err(Error::NotOrthogonal { .. })
        ));
        let y = indicator(&random_event(q, 1, 10).unwrap());
        let r = operator_commute_residual(&basis(q, 0), &plus(q), &y).unwrap();
        assert!(r.is_finite());
    }

    #[test]
    fn jordan_identity_examples() {
        let q = Model::quantum(3).unwrap();
        let x = random_observable(q, 2.0, 5);
        let unit = PrimitiveObservable::unit(q);
        assert!(jordan_identity_residual(&x, &unit).unwrap() < 1e-12);
        let chi = indicator(&random_event(q, 1, 6).unwrap());
        let y = random_observable(q, 2.0, 7);
        assert!(jordan_identity_residual(&chi, &y).unwrap() < 1e-8);
        assert!(jordan_identity_residual(&x, &y).unwrap() < 1e-5);
    }

    #[test]
    fn associativity_witness_on_qubit() {
        let q = qubit();
        let (p, r) = (indicator(&basis(q, 0)), indicator(&plus(q)));
        // (P∘P)∘Q − P∘(P∘Q) = σ_x / 8
        let residual = associativity_residual(&p, &p, &r).unwrap();
        assert!((residual - 0.125).abs() < 1e-12, "{residual}");
        // flexible law: (X∘Y)∘X = X∘(Y∘X)
        assert!(associativity_residual(&p, &r, &p).unwrap() < 1e-12);

        let c = Model::classical(4).unwrap();
        let (x, y, z) = (random_observable(c, 1.0, 1), random_observable(c, 1.0, 2), random_observable(c, 1.0, 3));
        assert!(associativity_residual(&x, &y, &z).unwrap() < 1e-15);
    }

    #[test]
    fn a1_examples() {
        let q = qubit();
        let (e, f) = (basis(q, 0), plus(q));
        let mu = random_state(q, 3);
        assert!(a1_residual(&mu, &e, &e).unwrap() < 1e-14);
        assert!(a1_residual(&mu, &e, &f).unwrap() < 1e-12);
        assert!(a1_operator_residual(&e, &f).unwrap() < 1e-14);

        let c = Model::classical(4).unwrap();
        let mu = random_state(c, 1);
        let a = Event::from_indices(c, [0, 1]).unwrap();
        let b = Event::from_indices(c, [1, 2]).unwrap();
        let lhs = joint_probability(&mu, &b, &a).unwrap() + joint_probability(&mu, &complement(&b), &complement(&a)).unwrap();
        let p = mu.probabilities().unwrap();
        assert!((lhs - (p[1] + p[3])).abs() < 1e-15);
        assert!(a1_residual(&mu, &a, &b).unwrap() < 1e-15);
    }

    #[test]
    fn joint_probability_falls_back_on_null_events() {
        let q = qubit();
        let e = basis(q, 0);
        let mu = State::pure(q, &CVector::from_vec(vec![c64(0.0, 0.0), c64(1.0, 0.0)])).unwrap();
        assert_eq!(joint_probability(&mu, &e, &plus(q)).unwrap(), 0.0);
        assert!(a1_residual(&mu, &e, &plus(q)).unwrap() < 1e-14);
    }

    #[test]
    fn model_mismatch() {
        let a = Model::quantum(2).unwrap();
        let b = Model::quantum(3).unwrap();
        let x = PrimitiveObservable::unit(a);
        let y = PrimitiveObservable::unit(b);
        assert!(matches!(jordan_product(&x, &y), Err(Error::ModelMismatch)));
        assert!(u_map(&a.one(), &b.one()).is_err());
    }
}
