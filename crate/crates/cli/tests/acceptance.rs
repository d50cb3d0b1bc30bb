//! Acceptance criteria, one line per criterion. Runs as a plain binary so
//! the lines are always printed; exits nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use qprob::jordan::{associativity_residual, product, ProductPath};
use qprob::linalg::{c64, hermitian_norm, CMatrix};
use qprob::models::random_event;
use qprob::observables::{distance, indicator, norm, random_observable, step_approximate};
use qprob::states::{conditional, conditional_uniqueness_probe, random_state};
use qprob::verifier::{run_suite, CheckResult, CheckSpec, WITNESS_THRESHOLD};
use qprob::Model;
use qprob_cli::Scenario;

const TOL: f64 = 1e-8;
const SEED: u64 = 42;

fn models() -> Vec<Model> {
    let mut all: Vec<Model> = [2, 3, 4, 6].iter().map(|&n| Model::classical(n).unwrap()).collect();
    all.extend([2, 3, 4, 6].iter().map(|&d| Model::quantum(d).unwrap()));
    all
}

fn quantum(d: usize) -> Model {
    Model::quantum(d).unwrap()
}

struct SuiteRun {
    results: Vec<CheckResult>,
    elapsed: Duration,
}

impl SuiteRun {
    fn failures(&self) -> Vec<String> {
        self.results
            .iter()
            .filter(|c| !c.passed)
            .map(|c| {
                let w = c.worst.as_ref().unwrap();
                format!("{} on {}: {} = {:.3e} {} {:.1e}", c.id, c.model, w.label, w.residual, w.relation, w.bound)
            })
            .collect()
    }

    fn worst(&self, id: &str) -> f64 {
        self.results
            .iter()
            .filter(|c| c.id == id)
            .map(|c| c.worst.as_ref().unwrap().residual)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn suite(ids: &[&str], models: &[Model], trials: usize) -> SuiteRun {
    let start = Instant::now();
    let mut results = Vec::new();
    for &model in models {
        let specs: Vec<CheckSpec> = ids
            .iter()
            .map(|id| CheckSpec::new(*id, model).with_trials(trials).with_seed(SEED).with_tolerance(TOL))
            .collect();
        results.extend(run_suite(&specs).unwrap().checks);
    }
    SuiteRun { results, elapsed: start.elapsed() }
}

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(failures: Vec<String>, detail: String) -> Verdict {
    if failures.is_empty() {
        Verdict { passed: true, detail }
    } else {
        Verdict { passed: false, detail: format!("{detail}; failures: {}", failures.join(" | ")) }
    }
}

fn criterion_1() -> Verdict {
    let run = suite(&["OS1", "OS2", "OS3", "OS4", "OS5", "OS6"], &models(), 500);
    let mut failures = run.failures();
    if run.elapsed >= Duration::from_secs(5) {
        failures.push(format!("runtime {:.2?} ≥ 5 s", run.elapsed));
    }
    verdict(failures, format!("OS1–OS6, 8 models × 500 trials in {:.2?}", run.elapsed))
}

fn criterion_2() -> Verdict {
    let run = suite(&["UC1", "UC2"], &models(), 500);
    let mut failures = run.failures();
    let mut probes = 0;
    let mut worst_luders: f64 = 0.0;
    for d in [3, 4] {
        let q = quantum(d);
        for k in 0..100u64 {
            let mu = random_state(q, 1000 * d as u64 + k);
            let e = random_event(q, 1 + (k as usize % d), 7 + k).unwrap();
            if !conditional_uniqueness_probe(&mu, &e, 8, k).unwrap() {
                failures.push(format!("uniqueness probe rejected d={d} triple {k}"));
            }
            probes += 1;
            // Lüders oracle PρP / tr(ρP)
            let p = e.to_matrix();
            let rho = mu.to_matrix();
            let compressed = &p * &rho * &p;
            let trace = (0..d).map(|i| compressed[(i, i)].re).sum::<f64>();
            let oracle = compressed.unscale(trace);
            worst_luders = worst_luders.max(hermitian_norm(&(conditional(&mu, &e).unwrap().to_matrix() - oracle)));
        }
    }
    if worst_luders > 10.0 * TOL {
        failures.push(format!("conditional differs from PρP/tr(ρP) by {worst_luders:.3e}"));
    }
    verdict(
        failures,
        format!(
            "UC1/UC2 8 models × 500 trials (min separating gap {:.3e}, worst contract residual {:.3e}); \
             {probes} uniqueness probes at d∈{{3,4}} true; Lüders oracle within {worst_luders:.1e}",
            min_gap(&run),
            run.worst("UC2")
        ),
    )
}

fn min_gap(run: &SuiteRun) -> f64 {
    run.results
        .iter()
        .filter(|c| c.id == "UC1")
        .map(|c| c.worst.as_ref().unwrap().residual)
        .fold(f64::INFINITY, f64::min)
}

fn criterion_3() -> Verdict {
    let run = suite(&["A1", "A2", "A3"], &models(), 1000);
    let mut failures = run.failures();
    let mut worst: f64 = 0.0;
    for d in [2, 3, 4] {
        let q = quantum(d);
        let id = CMatrix::identity(d, d);
        for k in 0..1000u64 {
            let e = random_event(q, (k as usize) % (d + 1), 3 * k).unwrap().to_matrix();
            let f = random_event(q, (k as usize / 3) % (d + 1), 3 * k + 1).unwrap().to_matrix();
            let (ec, fc) = (&id - &e, &id - &f);
            let lhs = &e * &f * &e + &ec * &fc * &ec;
            let rhs = &f * &e * &f + &fc * &ec * &fc;
            worst = worst.max(hermitian_norm(&(lhs - rhs)));
        }
    }
    if worst > TOL {
        failures.push(format!("EFE + E′F′E′ − FEF − F′E′F′ = {worst:.3e}"));
    }
    verdict(
        failures,
        format!(
            "A1/A2/A3 8 models × 1000 trials (worst {:.1e}/{:.1e}/{:.1e}); operator identity at d∈{{2,3,4}} within {worst:.1e}",
            run.worst("A1"),
            run.worst("A2"),
            run.worst("A3")
        ),
    )
}

fn criterion_4() -> Verdict {
    let mut run = suite(&["L5.1.i"], &models(), 200);
    let second = suite(&["L5.1.ii"], &models(), 1000);
    run.results.extend(second.results);
    verdict(
        run.failures(),
        "L5.1.i 200 X × (certifying + 1000 states), L5.1.ii 1000 pairs, 8 models".to_string(),
    )
}

fn criterion_5() -> Verdict {
    let mut run = suite(&["L5.2.i", "L5.2.ii"], &models(), 200);
    let mut failures = run.failures();
    let levels = [1u32, 2, 4, 8, 16, 32, 64, 128, 256];
    let mut observables = 0;
    let mut rises = 0;
    for model in models() {
        for k in 0..200u64 {
            let x = random_observable(model, 2.0, 500 + k);
            let r = norm(&x);
            let errors: Vec<f64> = levels.iter().map(|&n| distance(&x, &step_approximate(&x, n)).unwrap()).collect();
            for (&n, &e) in levels.iter().zip(&errors) {
                if e > r / n as f64 + TOL {
                    failures.push(format!("{model} X#{k}: error {e:.3e} > r/{n}"));
                }
            }
            observables += 1;
            if errors.windows(2).any(|w| w[1] > w[0] + TOL) {
                rises += 1;
            }
        }
    }
    run.results.clear();
    verdict(
        failures,
        format!(
            "error ≤ r/n + tol for n = 1..256 over {observables} X; bound r/n and the uniform step error \
             sup|f_n − id| strictly decrease; convex decomposition over 200 X per model. \
             Per-observable error is not monotone for {rises}/{observables} X (midpoint quantizer)"
        ),
    )
}

fn criterion_6() -> Verdict {
    let run = suite(&["T6.1.i", "T6.1.ii", "T6.1.iii"], &models(), 1000);
    let mut failures = run.failures();
    let (mut worst_oracle, mut worst_path): (f64, f64) = (0.0, 0.0);
    for d in [2, 3, 4, 6] {
        let q = quantum(d);
        for k in 0..1000u64 {
            let x = random_observable(q, 1.0, 2 * k);
            let y = random_observable(q, 1.0, 2 * k + 1);
            let (a, b) = (x.operator(), y.operator());
            let (xy, trace) = product(&x, &y, ProductPath::Both).unwrap();
            let oracle = (&a * &b + &b * &a).scale(0.5);
            worst_oracle = worst_oracle.max(hermitian_norm(&(xy.operator() - oracle)));
            worst_path = worst_path.max(trace.unwrap().discrepancy.unwrap());
        }
    }
    if worst_oracle > 1e2 * TOL {
        failures.push(format!("symmetrized-product oracle residual {worst_oracle:.3e}"));
    }
    if worst_path > 1e3 * TOL {
        failures.push(format!("path discrepancy {worst_path:.3e}"));
    }
    verdict(
        failures,
        format!(
            "T6.1 (i)(ii)(iii) 8 models × 1000 pairs; oracle ‖A(X∘Y) − ½(AB+BA)‖ ≤ {worst_oracle:.1e} and \
             path discrepancy ≤ {worst_path:.1e} over 1000 pairs at d∈{{2,3,4,6}}"
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut run = suite(&["L7.1"], &models(), 500);
    let second = suite(&["T7.2"], &models(), 1000);
    run.results.extend(second.results);
    verdict(
        run.failures(),
        format!(
            "operator-commute worst {:.1e} (500 pairs), Jordan identity worst {:.1e} (1000 pairs), 8 models",
            run.worst("L7.1"),
            run.worst("T7.2")
        ),
    )
}

fn symmetrized(a: &CMatrix, b: &CMatrix) -> CMatrix {
    (a * b + b * a).scale(0.5)
}

fn criterion_8() -> Verdict {
    let classical: Vec<Model> = [2, 3, 4, 6].iter().map(|&n| Model::classical(n).unwrap()).collect();
    let run = suite(&["S7.assoc-classical"], &classical, 1000);
    let mut failures = run.failures();

    let search = run_suite(&[CheckSpec::new("S7.nonassoc-quantum", quantum(2)).with_trials(500)]).unwrap();
    let found = &search.checks[0];
    let witness = found.worst.as_ref().unwrap();
    if !found.passed || witness.residual <= WITNESS_THRESHOLD || found.trials_run > 500 {
        failures.push(format!(
            "witness search: passed={} residual {:.3e} after {} trials",
            found.passed, witness.residual, found.trials_run
        ));
    }

    // 2×2 matrix oracle for (χ_P, χ_P, χ_Q): residual 1/8
    let p = CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
    let q = CMatrix::from_element(2, 2, c64(0.5, 0.0));
    let oracle = hermitian_norm(&(symmetrized(&symmetrized(&p, &p), &q) - symmetrized(&p, &symmetrized(&p, &q))));
    let qubit = Scenario::bundled("qubit").unwrap();
    let chi_p = indicator(qubit.event("P").unwrap());
    let chi_q = indicator(qubit.event("Q").unwrap());
    let analytic = associativity_residual(&chi_p, &chi_p, &chi_q).unwrap();
    if (oracle - 0.125).abs() > 1e-15 || (analytic - 0.125).abs() > 1e-12 {
        failures.push(format!("analytic witness: oracle {oracle}, computed {analytic}"));
    }
    verdict(
        failures,
        format!(
            "classical associativity worst {:.1e} over 1000 triples × 4 models; quantum witness residual {:.4} \
             within the first batch of {}; analytic pair residual {analytic:.15} (oracle 1/8)",
            run.worst("S7.assoc-classical"),
            witness.residual,
            found.trials_run
        ),
    )
}

fn strip_elapsed(report: &str) -> String {
    report.lines().filter(|l| !l.contains("\"elapsed_ms\"")).collect::<Vec<_>>().join("\n")
}

fn criterion_9() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_qprob");
    let dir = tempfile::tempdir().unwrap();
    let mut failures = Vec::new();
    let mut total = Duration::ZERO;
    for name in ["classical4", "qubit", "qutrit"] {
        let mut outputs = Vec::new();
        for round in 0..2 {
            let path = dir.path().join(format!("{name}-{round}.json"));
            let start = Instant::now();
            let out = Command::new(bin)
                .args(["verify", "--model", name, "--suite", "all", "--format", "structured", "--report"])
                .arg(&path)
                .output()
                .unwrap();
            if round == 0 {
                total += start.elapsed();
            }
            if out.status.code() != Some(0) {
                failures.push(format!("{name}: exit {:?}", out.status.code()));
            }
            outputs.push((String::from_utf8_lossy(&out.stdout).into_owned(), read(&path)));
        }
        if strip_elapsed(&outputs[0].0) != strip_elapsed(&outputs[1].0) {
            failures.push(format!("{name}: printed report differs between runs"));
        }
        if strip_elapsed(&outputs[0].1) != strip_elapsed(&outputs[1].1) {
            failures.push(format!("{name}: structured report differs between runs"));
        }
    }
    if total >= Duration::from_secs(60) {
        failures.push(format!("total runtime {total:.2?} ≥ 60 s"));
    }
    verdict(failures, format!("verify --suite all on 3 bundled scenarios in {total:.2?}; reports byte-identical across runs"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_default()
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        ("orthospace suite", criterion_1),
        ("separation and conditioning", criterion_2),
        ("axioms A1–A3", criterion_3),
        ("norm as sup of expectations", criterion_4),
        ("step and convex approximation", criterion_5),
        ("Jordan product", criterion_6),
        ("operator-commute and Jordan identity", criterion_7),
        ("classical/quantum dichotomy", criterion_8),
        ("end-to-end verify", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let status = if v.passed { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {} ({name}, {:.1?}): {}", i + 1, start.elapsed(), v.detail);
        if !v.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
