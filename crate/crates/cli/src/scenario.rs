//! Scenario files: a model plus named events, states and observables, and
//! an optional suite section.
//!
//! The format is JSON:
//!
//! ```json
//! {
//!   "schema": 1,
//!   "model": {"kind": "quantum", "size": 2, "tolerance": 1e-8},
//!   "events": {
//!     "P": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
//!     "Q": {"span": [[[1, 0], [1, 0]]]}
//!   },
//!   "states": {"mu": {"pure": [[0.6, 0], [0.8, 0]]}},
//!   "observables": {"chiP": [{"value": 1, "event": "P"}]},
//!   "suite": {"checks": ["all"], "trials": 500, "seed": 42, "tolerance": 1e-8}
//! }
//! ```
//!
//! Classical events are lists of sample point labels starting at 1 and
//! classical states are probability vectors. Complex entries are always
//! `[re, im]` pairs. Observable records name an event or give it inline.

use std::fmt;
use std::path::Path;

use qprob::serial;
use qprob::verifier::CHECK_IDS;
use qprob::{Event, Model, PrimitiveObservable, State};
use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

pub const SCENARIO_SCHEMA: u64 = 1;

pub const BUNDLED: &[(&str, &str)] = &[
    ("classical4", include_str!("../scenarios/classical4.json")),
    ("qubit", include_str!("../scenarios/qubit.json")),
    ("qutrit", include_str!("../scenarios/qutrit.json")),
];

/// Map entries in file order, duplicates kept so they can be reported.
#[derive(Debug, Default)]
struct Entries(Vec<(String, Value)>);

impl<'de> Deserialize<'de> for Entries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = Entries;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map of names to definitions")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Entries, A::Error> {
                let mut entries = Vec::new();
                while let Some(entry) = map.next_entry::<String, Value>()? {
                    entries.push(entry);
                }
                Ok(Entries(entries))
            }
        }

        deserializer.deserialize_map(EntriesVisitor)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema: Option<u64>,
    model: Value,
    #[serde(default)]
    events: Entries,
    #[serde(default)]
    states: Entries,
    #[serde(default)]
    observables: Entries,
    suite: Option<SuiteSection>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSection {
    pub checks: Option<Vec<String>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

/// A loaded scenario with every object constructed and checked.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub model: Model,
    pub events: Vec<(String, Event)>,
    pub states: Vec<(String, State)>,
    pub observables: Vec<(String, PrimitiveObservable)>,
    pub suite: Option<SuiteSection>,
}

fn find<'a, T>(items: &'a [(String, T)], name: &str) -> Option<&'a T> {
    items.iter().find(|(n, _)| n == name).map(|(_, x)| x)
}

fn invariant(name: &str, err: qprob::Error) -> CliError {
    match err {
        qprob::Error::Parse(detail) => CliError::Parse(format!("{name}: {detail}")),
        other => CliError::InvariantViolation { name: name.to_string(), detail: other.to_string() },
    }
}

impl Scenario {
    /// A scenario with a model and nothing else.
    pub fn empty(model: Model) -> Self {
        Scenario { model, events: Vec::new(), states: Vec::new(), observables: Vec::new(), suite: None }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawScenario = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if let Some(schema) = raw.schema {
            if schema != SCENARIO_SCHEMA {
                return Err(CliError::Parse(format!("unsupported scenario schema {schema}")));
            }
        }
        let model = serial::model_from_json(&raw.model).map_err(|e| invariant("model", e))?;

        let mut seen = std::collections::HashSet::new();
        for (name, _) in raw.events.0.iter().chain(&raw.states.0).chain(&raw.observables.0) {
            if !seen.insert(name.as_str()) {
                return Err(CliError::InvariantViolation {
                    name: name.clone(),
                    detail: "name is defined more than once".into(),
                });
            }
        }

        let mut events = Vec::new();
        for (name, v) in raw.events.0 {
            let e = serial::event_from_json(model, &v).map_err(|e| invariant(&name, e))?;
            events.push((name, e));
        }
        let mut states = Vec::new();
        for (name, v) in raw.states.0 {
            let mu = serial::state_from_json(model, &v).map_err(|e| invariant(&name, e))?;
            states.push((name, mu));
        }
        let mut observables = Vec::new();
        for (name, v) in raw.observables.0 {
            let references = v.as_array().into_iter().flatten().filter_map(|r| r.get("event")?.as_str());
            for reference in references {
                if find(&events, reference).is_none() {
                    return Err(CliError::UnknownReference { name: reference.to_string() });
                }
            }
            let resolved = serial::observable_from_json(model, &v, |r| {
                find(&events, r).cloned().ok_or_else(|| qprob::Error::Parse(format!("unknown event `{r}`")))
            });
            observables.push((name.clone(), resolved.map_err(|e| invariant(&name, e))?));
        }

        if let Some(checks) = raw.suite.as_ref().and_then(|s| s.checks.as_ref()) {
            for id in checks {
                if id != "all" && !CHECK_IDS.contains(&id.as_str()) {
                    return Err(CliError::Core(qprob::Error::UnknownCheckId(id.clone())));
                }
            }
        }
        Ok(Scenario { model, events, states, observables, suite: raw.suite })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn bundled(name: &str) -> Option<Self> {
        bundled_text(name).map(|text| Self::parse(text).expect("bundled scenarios are valid"))
    }

    pub fn event(&self, name: &str) -> Result<&Event, CliError> {
        find(&self.events, name).ok_or_else(|| CliError::UnknownReference { name: name.into() })
    }

    pub fn state(&self, name: &str) -> Result<&State, CliError> {
        find(&self.states, name).ok_or_else(|| CliError::UnknownReference { name: name.into() })
    }

    /// A named observable, or the indicator of a named event.
    pub fn observable(&self, name: &str) -> Result<PrimitiveObservable, CliError> {
        if let Some(x) = find(&self.observables, name) {
            return Ok(x.clone());
        }
        find(&self.events, name)
            .map(qprob::observables::indicator)
            .ok_or_else(|| CliError::UnknownReference { name: name.into() })
    }

    /// The scenario in file form. Loading the result gives back the same
    /// objects; observables reference events inline.
    pub fn to_json(&self) -> Value {
        let map = |items: Vec<(String, Value)>| Value::Object(items.into_iter().collect());
        let mut root = serde_json::Map::new();
        root.insert("schema".into(), SCENARIO_SCHEMA.into());
        root.insert("model".into(), serial::model_to_json(&self.model));
        root.insert(
            "events".into(),
            map(self.events.iter().map(|(n, e)| (n.clone(), serial::event_to_json(e))).collect()),
        );
        root.insert(
            "states".into(),
            map(self.states.iter().map(|(n, s)| (n.clone(), serial::state_to_json(s))).collect()),
        );
        root.insert(
            "observables".into(),
            map(self.observables.iter().map(|(n, x)| (n.clone(), serial::observable_to_json(x))).collect()),
        );
        if let Some(suite) = &self.suite {
            let mut s = serde_json::Map::new();
            if let Some(c) = &suite.checks {
                s.insert("checks".into(), c.clone().into());
            }
            if let Some(t) = suite.trials {
                s.insert("trials".into(), t.into());
            }
            if let Some(seed) = suite.seed {
                s.insert("seed".into(), seed.into());
            }
            if let Some(tol) = suite.tolerance {
                s.insert("tolerance".into(), tol.into());
            }
            root.insert("suite".into(), Value::Object(s));
        }
        Value::Object(root)
    }
}

pub fn bundled_text(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Parses `kind:size`, e.g. `quantum:3` or `classical:6`.
pub fn parse_model_descriptor(s: &str) -> Result<Model, CliError> {
    let (kind, size) = s
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("unknown model `{s}`; use a bundled name or kind:size")))?;
    let size: usize = size.parse().map_err(|_| CliError::Usage(format!("bad model size in `{s}`")))?;
    let model = match kind {
        "classical" => Model::classical(size),
        "quantum" => Model::quantum(size),
        _ => return Err(CliError::Usage(format!("unknown model kind `{kind}`"))),
    };
    model.map_err(CliError::Core)
}
