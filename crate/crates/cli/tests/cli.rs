//! Behavior tests for the command-line interface: exit codes, error records,
//! unit conversion, and configuration merging.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdsc"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout should be JSON")
}

#[test]
fn usage_problems_exit_2() {
    // Missing required flag.
    assert_eq!(run(&["member", "--region", "ippr"]).status.code(), Some(2));
    // Unknown region.
    assert_eq!(
        run(&["member", "--region", "nowhere", "--point", "1,1,1,1,1"]).status.code(),
        Some(2)
    );
    // Malformed operating point.
    assert_eq!(
        run(&["member", "--region", "ippr", "--point", "1,2,3"]).status.code(),
        Some(2)
    );
    // The exact-characterization slices need an item.
    assert_eq!(
        run(&["member", "--region", "partial", "--point", "1,1,0.6,1,0.5"]).status.code(),
        Some(2)
    );
}

#[test]
fn computation_problems_exit_1_with_a_json_error_record() {
    let out = run(&["constants", "--sigma-x2", "0.0"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).expect("stderr JSON record");
    assert!(v["error"]["kind"].is_string());
    assert!(v["error"]["message"].is_string());

    let out = run(&["boundary", "--region", "ceo", "--d3", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "infeasible_distortion");
}

#[test]
fn bit_units_scale_rates_at_the_boundary() {
    let nats = run(&["boundary", "--region", "ceo", "--d3", "0.4", "--samples", "5"]);
    let bits = run(&["--units", "bits", "boundary", "--region", "ceo", "--d3", "0.4", "--samples", "5"]);
    assert!(nats.status.success() && bits.status.success());
    let parse = |out: &Output| -> Vec<(f64, f64)> {
        String::from_utf8_lossy(&out.stdout)
            .lines()
            .skip(2)
            .map(|l| {
                let mut it = l.split(',');
                (
                    it.next().unwrap().parse().unwrap(),
                    it.next().unwrap().parse().unwrap(),
                )
            })
            .collect()
    };
    let a = parse(&nats);
    let b = parse(&bits);
    assert_eq!(a.len(), b.len());
    for (&(r1n, r2n), &(r1b, r2b)) in a.iter().zip(&b) {
        assert!((r1n / std::f64::consts::LN_2 - r1b).abs() < 1e-10);
        assert!((r2n / std::f64::consts::LN_2 - r2b).abs() < 1e-10);
    }
}

#[test]
fn inline_flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"sigma_x2":1.7,"sigma_n1_2":0.5}"#).unwrap();
    let cfg = cfg.to_string_lossy().into_owned();

    let merged = stdout_json(&run(&["constants", "--config", &cfg]));
    let d1 = 1.0 / (1.0 / 1.7 + 1.0 / 0.5);
    assert!((merged["d1_min"].as_f64().unwrap() - d1).abs() < 1e-12);

    let overridden = stdout_json(&run(&["constants", "--config", &cfg, "--sigma-x2", "2.0"]));
    let d1 = 1.0 / (1.0 / 2.0 + 1.0 / 0.5);
    assert!((overridden["d1_min"].as_f64().unwrap() - d1).abs() < 1e-12);
}

#[test]
fn csv_output_starts_with_the_version_header() {
    let out = run(&["boundary", "--region", "d12out", "--rate", "0.5", "--samples", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# rdsc "));
    assert_eq!(lines.next().unwrap(), "d1,d2,label");
}

#[test]
fn an_impossible_sampling_tolerance_fails_the_validation_run() {
    let out = run(&["validate", "--n", "2000", "--seed", "7", "--tol", "0.0001sigma"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(text.lines().any(|l| l.contains("fail")));
}
