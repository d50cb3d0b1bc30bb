use std::process::{Command, Output};

fn qprob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qprob")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn passing_suite_exits_zero() {
    let out = qprob(&["verify", "--model", "qubit", "--suite", "OS1,A1,T7.2", "--trials", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("PASS  OS1"));
    assert!(text.ends_with("3 checks: 3 passed, 0 failed\n"));
}

#[test]
fn failing_suite_exits_one_and_prints_a_witness() {
    let out = qprob(&["verify", "--model", "quantum:3", "--suite", "T7.2", "--trials", "20", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL  T7.2"));
    assert!(text.contains("witness: trial"));
}

#[test]
fn errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"model": {"kind": "classical", "size": 2}, "events": {"A": [3]}}"#).unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["verify".into(), "--model".into(), "qubit".into(), "--suite".into(), "NOPE".into()],
        vec!["verify".into(), "--model".into(), "quantum:99".into()],
        vec!["verify".into(), "--scenario".into(), bad.display().to_string()],
        vec!["verify".into(), "--scenario".into(), dir.path().join("absent.json").display().to_string()],
        vec!["eval".into(), "--model".into(), "qubit".into(), "conditional".into(), "mu".into(), "Zero".into()],
        vec!["scenario".into(), "nope".into()],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = qprob(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "), "{args:?}");
    }
}

#[test]
fn eval_prints_json() {
    let out = qprob(&["eval", "--model", "qubit", "expect", "mu", "chiP"]);
    assert_eq!(out.status.code(), Some(0));
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v - 0.7).abs() < 1e-12);
}

#[test]
fn bundled_scenario_files_are_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let out = qprob(&["scenario", "qutrit"]);
    assert_eq!(out.status.code(), Some(0));
    let path = dir.path().join("qutrit.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let out = qprob(&["eval", "-s", path.to_str().unwrap(), "norm", "Sz"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |i: usize| {
        let path = dir.path().join(format!("r{i}.json"));
        let out = qprob(&["verify", "--model", "classical:5", "--trials", "100", "--seed", "9", "--report", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
        (stdout(&out), report)
    };
    let strip = |mut v: serde_json::Value| {
        for c in v["checks"].as_array_mut().unwrap() {
            c["elapsed_ms"] = 0.into();
        }
        v
    };
    let (text_a, report_a) = run(0);
    let (text_b, report_b) = run(1);
    assert_eq!(text_a, text_b);
    assert_eq!(strip(report_a.clone()), strip(report_b));
    assert_eq!(report_a["seed"], 9);
    assert_eq!(report_a["checks"].as_array().unwrap().len(), qprob::verifier::CHECK_IDS.len());
}
