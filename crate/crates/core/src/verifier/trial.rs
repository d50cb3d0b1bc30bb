use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use crate::models::Model;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Relation {
    /// `residual <= bound`
    AtMost,
    /// `value > threshold`
    Exceeds,
}

#[derive(Clone, Debug)]
pub(crate) struct Measurement {
    pub label: String,
    pub value: f64,
    pub bound: f64,
    pub relation: Relation,
}

impl Measurement {
    pub fn passed(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.value <= self.bound,
            Relation::Exceeds => self.value > self.bound,
        }
    }

    /// Ratio to the bound; above 1 means failure.
    pub fn severity(&self) -> f64 {
        let s = match self.relation {
            Relation::AtMost if self.value <= 0.0 => 0.0,
            Relation::AtMost if self.bound <= 0.0 => f64::INFINITY,
            Relation::AtMost => self.value / self.bound,
            Relation::Exceeds if self.value <= 0.0 => f64::INFINITY,
            Relation::Exceeds => self.bound / self.value,
        };
        if s.is_nan() {
            f64::INFINITY
        } else {
            s
        }
    }

    /// Failures first, then by severity.
    pub fn rank_key(&self) -> (bool, f64) {
        (!self.passed(), self.severity())
    }
}

/// Per-trial context: the model under test, the check tolerance, a private
/// RNG stream, and the measurements taken so far.
pub(crate) struct Trial {
    pub model: Model,
    pub tol: f64,
    pub index: usize,
    pub rng: ChaCha8Rng,
    measurements: Vec<Measurement>,
    inputs: Option<Map<String, Value>>,
}

impl Trial {
    pub fn new(model: Model, tol: f64, index: usize, rng: ChaCha8Rng, record: bool) -> Self {
        Trial { model, tol, index, rng, measurements: Vec::new(), inputs: record.then(Map::new) }
    }

    pub fn at_most(&mut self, label: impl Into<String>, residual: f64, bound: f64) {
        self.measurements.push(Measurement {
            label: label.into(),
            value: residual,
            bound,
            relation: Relation::AtMost,
        });
    }

    pub fn exceeds(&mut self, label: impl Into<String>, value: f64, threshold: f64) {
        self.measurements.push(Measurement {
            label: label.into(),
            value,
            bound: threshold,
            relation: Relation::Exceeds,
        });
    }

    pub fn holds(&mut self, label: impl Into<String>, condition: bool) {
        self.at_most(label, if condition { 0.0 } else { 1.0 }, 0.0);
    }

    /// Stores a serialized input; only evaluated while recording a witness.
    pub fn record(&mut self, name: &str, value: impl FnOnce() -> Value) {
        if let Some(inputs) = &mut self.inputs {
            inputs.insert(name.to_string(), value());
        }
    }

    pub fn finish(self) -> (Vec<Measurement>, Option<Map<String, Value>>) {
        (self.measurements, self.inputs)
    }
}
