//! Output-format and determinism contracts of the CLI: every command emits
//! valid JSON or CSV, identical configs and seeds give byte-identical
//! output, and the exit codes distinguish usage errors from numerical
//! validation failures.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orthomorse"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn write_temp(name: &str, content: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("orthomorse-test-{name}-{}", std::process::id()));
    std::fs::write(&path, content).unwrap();
    path
}

#[test]
fn betti_emits_csv_that_parses() {
    let text = stdout_of(&["betti", "--n", "4"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,b_i,c_i,frankel_ok"));
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4, "bad CSV row {line:?}");
        let _: u64 = fields[0].parse().unwrap();
        let b: u64 = fields[1].parse().unwrap();
        let c: u64 = fields[2].parse().unwrap();
        let ok: bool = fields[3].parse().unwrap();
        assert!(ok);
        assert_eq!(2 * b, c);
        rows += 1;
    }
    assert_eq!(rows, 7); // degrees 0..=C(4,2)
}

#[test]
fn betti_n3_is_the_projective_space_polynomial() {
    let text = stdout_of(&["betti", "--n", "3"]);
    let bs: Vec<u64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(bs, vec![1, 1, 1, 1]);
}

#[test]
fn fillings_emits_json_array() {
    let margins = write_temp("margins", r#"{"m": [1, 1, 1], "n": [1, 1, 1]}"#);
    let text = stdout_of(&["fillings", "--margins", margins.to_str().unwrap()]);
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 6);
    for row in rows.as_array().unwrap() {
        assert!(row["index"].is_u64());
        assert!(row["dimension"].is_u64());
        assert!(row["eps"].is_array());
    }
}

#[test]
fn frankel_reports_equality_under_both_conventions() {
    for iota in ["k", "complement"] {
        let text = stdout_of(&["frankel", "--n", "6", "--iota", iota]);
        let report: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(report["all_equal"], serde_json::Value::Bool(true));
    }
}

#[test]
fn critical_all_spms_diagnostics_hold() {
    let spectra = write_temp(
        "spectra",
        r#"{"a": {"values": [0.0, 1.0], "mults": [2, 1]}, "b": {"values": [1.0, 2.0, 3.0], "mults": [1, 1, 1]}}"#,
    );
    let text = stdout_of(&["critical", "--spectra", spectra.to_str().unwrap(), "--all-spms"]);
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    let spms = report["spms"].as_array().unwrap();
    assert_eq!(spms.len(), 48);
    for spm in spms {
        assert_eq!(spm["diagonal_matches_form"], serde_json::Value::Bool(true));
        assert_eq!(spm["index_matches_filling"], serde_json::Value::Bool(true));
        assert_eq!(
            spm["nullity_matches_dimension"],
            serde_json::Value::Bool(true)
        );
    }
}

#[test]
fn critical_sorts_raw_spectra_and_records_the_order() {
    let spectra = write_temp(
        "unsorted",
        r#"{"a": {"values": [3.0, 1.0], "mults": [2, 1]}, "b": {"values": [1.0, 0.0, 2.0], "mults": [1, 1, 1]}}"#,
    );
    let text = stdout_of(&["critical", "--spectra", spectra.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["spectra_sort"]["a"], serde_json::json!([2, 1]));
    assert_eq!(report["spectra_sort"]["b"], serde_json::json!([2, 1, 3]));
    // Margins follow the sorted order: a-values (1, 3) carry mults (1, 2).
    assert_eq!(report["margins"]["m"], serde_json::json!([1, 2]));
}

#[test]
fn linear_grassmann_diagnostics() {
    let text = stdout_of(&["linear", "--n", "4", "--grassmann", "1", "--morse-report", "4"]);
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["point"]["critical"], serde_json::Value::Bool(true));
    // Index C(n - k, 2) = C(3, 2) = 3 at the k = 1 reflection.
    assert_eq!(report["point"]["hessian_index"], serde_json::json!(3));
    assert_eq!(report["point"]["grassmann_k"], serde_json::json!(1));
    assert_eq!(report["morse_report"]["all_equal"], serde_json::Value::Bool(true));
}

#[test]
fn flow_output_is_deterministic_given_the_seed() {
    let args = ["flow", "--f", "nn", "--n", "4", "--seed", "9", "--count", "2"];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second, "same config and seed must be byte-identical");
    let report: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(report["seed"], serde_json::json!(9));
    for t in report["trajectories"].as_array().unwrap() {
        assert_eq!(t["converged"], serde_json::Value::Bool(true));
    }

    let other = stdout_of(&["flow", "--f", "nn", "--n", "4", "--seed", "10", "--count", "2"]);
    assert_ne!(first, other, "different seeds should differ");
}

#[test]
fn prop_main_records_the_seed_and_passes() {
    let args = ["prop-main", "--n", "4", "--samples", "25", "--seed", "3"];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second);
    let report: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(report["seed"], serde_json::json!(3));
    assert_eq!(report["passes"], serde_json::json!(25));
    assert_eq!(report["failures"], serde_json::json!(0));
}

#[test]
fn randomized_commands_require_an_explicit_seed() {
    for args in [
        vec!["flow", "--f", "nn", "--n", "4"],
        vec!["prop-main", "--n", "4", "--samples", "5"],
        vec!["verify"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "args {args:?}");
    }
}

#[test]
fn usage_errors_exit_with_1() {
    let missing = run(&["fillings", "--margins", "/nonexistent/margins.json"]);
    assert_eq!(missing.status.code(), Some(1));

    let bad_margins = write_temp("bad-margins", r#"{"m": [2, 1], "n": [1, 1]}"#);
    let unequal = run(&["fillings", "--margins", bad_margins.to_str().unwrap()]);
    assert_eq!(unequal.status.code(), Some(1));

    let unknown = run(&["no-such-command"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_2() {
    // A rotation by 0.4 radians is orthogonal but not critical; asking for
    // its decomposition is a numerical-validation failure.
    let c = 0.4f64.cos();
    let s = 0.4f64.sin();
    let x = write_temp(
        "rot",
        &format!(r#"{{"rows": 2, "cols": 2, "entries": [{c}, {ms}, {s}, {c}]}}"#, ms = -s),
    );
    let spectra = write_temp(
        "spec2",
        r#"{"a": {"values": [1.0, 2.0], "mults": [1, 1]}, "b": {"values": [1.0, 2.0], "mults": [1, 1]}}"#,
    );
    let out = run(&[
        "critical",
        "--spectra",
        spectra.to_str().unwrap(),
        "--decompose",
        x.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // A non-orthogonal matrix fails certification the same way.
    let skewed = write_temp(
        "skewed",
        r#"{"rows": 2, "cols": 2, "entries": [1.0, 0.1, 0.0, 1.0]}"#,
    );
    let out = run(&[
        "critical",
        "--spectra",
        spectra.to_str().unwrap(),
        "--decompose",
        skewed.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_documents_every_subcommand() {
    let help = stdout_of(&["--help"]);
    for name in [
        "fillings", "betti", "frankel", "critical", "linear", "flow", "prop-main", "verify",
    ] {
        assert!(help.contains(name), "help missing {name}");
    }
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));

    let flow_help = stdout_of(&["flow", "--help"]);
    for flag in ["--seed", "--count", "--step", "--grad-tol", "--max-steps"] {
        assert!(flow_help.contains(flag), "flow help missing {flag}");
    }
}

#[test]
fn verify_passes_and_emits_json() {
    let out = run(&["verify", "--seed", "5"]);
    assert!(
        out.status.success(),
        "verify failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report["all_passed"], serde_json::Value::Bool(true));
    assert!(report["checks"].as_array().unwrap().len() >= 25);
}
