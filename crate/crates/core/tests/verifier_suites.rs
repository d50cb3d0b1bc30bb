use qprob::verifier::{full_suite, run_suite, VerificationReport};
use qprob::Model;

fn describe(report: &VerificationReport) -> String {
    report
        .checks
        .iter()
        .map(|c| {
            let w = c.worst.as_ref().unwrap();
            format!(
                "{:<20} {:<5} {:>9.1}ms worst {:>10.3e} {} {:.1e} ({})",
                c.id,
                if c.passed { "pass" } else { "FAIL" },
                c.elapsed_ms,
                w.residual,
                w.relation,
                w.bound,
                w.label
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn run(model: Model) {
    let report = run_suite(&full_suite(model, 500, 42, 1e-8)).unwrap();
    println!("{model}\n{}", describe(&report));
    assert!(report.passed(), "{model}:\n{}", describe(&report));
    assert_eq!(report.checks.len(), qprob::verifier::CHECK_IDS.len());
}

#[test]
fn classical_models_pass_every_check() {
    for n in [2, 3, 4, 6] {
        run(Model::classical(n).unwrap());
    }
}

#[test]
fn quantum_models_pass_every_check() {
    for d in [2, 3, 4, 6] {
        run(Model::quantum(d).unwrap());
    }
}

#[test]
fn failing_witnesses_replay() {
    use qprob::verifier::replay;
    for model in [Model::classical(5).unwrap(), Model::quantum(3).unwrap()] {
        let specs = full_suite(model, 40, 11, 1e-300);
        let report = run_suite(&specs).unwrap();
        assert!(!report.passed());
        for (spec, result) in specs.iter().zip(&report.checks) {
            if result.passed {
                continue;
            }
            let worst = result.worst.as_ref().unwrap();
            let again = replay(spec, worst).unwrap();
            let scale = worst.residual.abs().max(1e-300);
            assert!((again - worst.residual).abs() <= 0.01 * scale, "{} on {model}: {again} vs {}", spec.id, worst.residual);
        }
    }
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let specs = full_suite(Model::quantum(2).unwrap(), 60, 3, 1e-8);
    let mut a = run_suite(&specs).unwrap();
    let mut b = run_suite(&specs).unwrap();
    for c in a.checks.iter_mut().chain(b.checks.iter_mut()) {
        c.elapsed_ms = 0.0;
    }
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
