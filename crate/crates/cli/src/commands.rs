use std::fmt::Write as _;

use qprob::verifier::{self, CheckSpec, VerificationReport, CHECK_IDS};
use qprob::{jordan, observables, serial, states};
use serde_json::Value;

use crate::error::CliError;
use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

/// Command-line overrides of a scenario's suite section.
#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub suite: Option<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

/// Expands `all` and comma- or space-separated id lists.
pub fn parse_suite(list: &[String]) -> Result<Vec<String>, CliError> {
    let mut ids = Vec::new();
    for word in list.iter().flat_map(|s| s.split([',', ' '])).filter(|s| !s.is_empty()) {
        if word == "all" {
            ids.extend(CHECK_IDS.iter().map(|s| s.to_string()));
        } else if CHECK_IDS.contains(&word) {
            ids.push(word.to_string());
        } else {
            return Err(CliError::Core(qprob::Error::UnknownCheckId(word.to_string())));
        }
    }
    Ok(ids)
}

pub fn build_specs(scenario: &Scenario, opts: &VerifyOptions) -> Result<Vec<CheckSpec>, CliError> {
    let section = scenario.suite.clone().unwrap_or_default();
    let ids = match (&opts.suite, &section.checks) {
        (Some(s), _) => parse_suite(std::slice::from_ref(s))?,
        (None, Some(list)) => parse_suite(list)?,
        (None, None) => parse_suite(&["all".to_string()])?,
    };
    let trials = opts.trials.or(section.trials).unwrap_or(verifier::DEFAULT_TRIALS);
    let seed = opts.seed.or(section.seed).unwrap_or(verifier::DEFAULT_SEED);
    let tolerance = opts.tolerance.or(section.tolerance).unwrap_or(verifier::DEFAULT_TOLERANCE);
    Ok(ids
        .into_iter()
        .map(|id| {
            CheckSpec::new(id, scenario.model).with_trials(trials).with_seed(seed).with_tolerance(tolerance)
        })
        .collect())
}

pub fn verify(scenario: &Scenario, opts: &VerifyOptions) -> Result<VerificationReport, CliError> {
    let specs = build_specs(scenario, opts)?;
    Ok(verifier::run_suite(&specs)?)
}

/// Human-readable summary. Timings are left out so that the output only
/// depends on the inputs.
pub fn render_text(report: &VerificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "qprob {} (report schema {})", report.toolkit_version, report.schema);
    match (report.model, report.seed) {
        (Some(m), Some(s)) => {
            let _ = writeln!(out, "model {m}, seed {s}");
        }
        (Some(m), None) => {
            let _ = writeln!(out, "model {m}");
        }
        _ => {}
    }
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = write!(out, "{status}  {:<20} {:>6} trials", c.id, c.trials_run);
        if let Some(w) = &c.worst {
            let _ = write!(out, "  worst {:.3e} {} {:.1e}  [{}]", w.residual, w.relation, w.bound, w.label);
        }
        out.push('\n');
        if let Some(note) = &c.note {
            let _ = writeln!(out, "      note: {note}");
        }
        if !c.passed {
            if let Some(w) = &c.worst {
                let _ = writeln!(out, "      witness: trial {} (seed {}) {}", w.trial, w.trial_seed, w.inputs);
            }
        }
    }
    let failed = report.failures().count();
    let _ = writeln!(out, "{} checks: {} passed, {} failed", report.checks.len(), report.checks.len() - failed, failed);
    out
}

pub fn render_structured(report: &VerificationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

fn arity(words: &[String], n: usize, usage: &str) -> Result<(), CliError> {
    if words.len() != n + 1 {
        return Err(CliError::Usage(format!("usage: {usage}")));
    }
    Ok(())
}

/// Evaluates one expression against the scenario's named objects. The
/// result uses the scenario file encoding.
pub fn eval(scenario: &Scenario, words: &[String]) -> Result<Value, CliError> {
    let op = words.first().map(String::as_str).unwrap_or("");
    match op {
        "product" => {
            arity(words, 2, "product X Y")?;
            let x = scenario.observable(&words[1])?;
            let y = scenario.observable(&words[2])?;
            Ok(serial::observable_to_json(&jordan::jordan_product(&x, &y)?))
        }
        "conditional" => {
            arity(words, 2, "conditional MU E")?;
            let mu = scenario.state(&words[1])?;
            let e = scenario.event(&words[2])?;
            Ok(serial::state_to_json(&states::conditional(mu, e)?))
        }
        "expect" => {
            arity(words, 2, "expect MU X")?;
            let mu = scenario.state(&words[1])?;
            let x = scenario.observable(&words[2])?;
            Ok(Value::from(observables::expectation(mu, &x)?))
        }
        "spectrum" => {
            arity(words, 1, "spectrum X")?;
            Ok(serial::observable_to_json(&scenario.observable(&words[1])?))
        }
        "norm" => {
            arity(words, 1, "norm X")?;
            Ok(Value::from(observables::norm(&scenario.observable(&words[1])?)))
        }
        "a1" => {
            arity(words, 3, "a1 MU E F")?;
            let mu = scenario.state(&words[1])?;
            let e = scenario.event(&words[2])?;
            let f = scenario.event(&words[3])?;
            Ok(Value::from(jordan::a1_residual(mu, e, f)?))
        }
        _ => Err(CliError::Usage(format!(
            "unknown expression `{op}`; expected product, conditional, expect, spectrum, norm or a1"
        ))),
    }
}
