use std::process::{Command, Output};

fn heckeamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heckeamp")).args(args).output().unwrap()
}

#[test]
fn passing_run_exits_zero() {
    let out = heckeamp(&["verify-hecke", "--primes", "2", "--max-radius", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["allPass"], true);
    assert_eq!(report["config"]["seed"], "42");
    assert_eq!(report["results"]["2"]["tauP_squared"]["0"], "6");
}

#[test]
fn failing_verdict_is_named() {
    let out = heckeamp(&["split-density", "--poly", "x^2+1", "--limit", "1000", "--expected", "1/3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL: density_within_tolerance"));
}

#[test]
fn invalid_input_exits_two() {
    let out = heckeamp(&["verify-hecke", "--primes", "17"]);
    assert_eq!(out.status.code(), Some(2));
    let out = heckeamp(&["amplifier", "--Q", "50", "--poly", "2x^2+1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let args = ["orbit-check", "--orbit", "sl2", "--primes", "2,3", "--max-radius", "4"];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert_eq!(heckeamp(&with_out).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), heckeamp(&args).stdout);
}

#[test]
fn timing_is_opt_in() {
    let args = ["denom-check", "--samples", "5"];
    let plain = heckeamp(&args);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("wallTimeSeconds"));
    let mut timed = args.to_vec();
    timed.push("--timing");
    assert!(String::from_utf8_lossy(&heckeamp(&timed).stdout).contains("wallTimeSeconds"));
}

#[test]
fn amplifier_report_fields() {
    let out = heckeamp(&["amplifier", "--Q", "50", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let e = &r["results"]["sweep"][0];
    let s: u64 = [53u64, 61, 73, 89, 97].iter().map(|p| p * (p + 1)).sum();
    assert_eq!(e["Lambda"], (s * s - s).to_string());
    assert_eq!(e["cTau"], s.to_string());
    assert_eq!(e["intersectionCount"], "0");
    assert_eq!(e["ratioIntersections"], "0");
}
