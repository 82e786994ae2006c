//! End-to-end tests driving the compiled binary.
//!
//! Each test spawns `mcf` exactly as a user would, feeds it input on stdin
//! or via a file path, and checks stdout, stderr, and the exit code.  The
//! expected texts are frozen from hand-checked runs; a change here means
//! the command-line contract changed.

use std::io::Write;
use std::process::{Command, Output, Stdio};

/// Runs the binary with `args`, writing `stdin` to its standard input.
/// Returns (stdout, stderr, exit code).
fn run(args: &[&str], stdin: &str) -> (String, String, i32) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mcf"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .expect("stdin handle")
        .write_all(stdin.as_bytes())
        .expect("stdin accepts input");
    let Output {
        status,
        stdout,
        stderr,
    } = child.wait_with_output().expect("binary runs to completion");
    (
        String::from_utf8(stdout).expect("stdout is utf-8"),
        String::from_utf8(stderr).expect("stderr is utf-8"),
        status.code().unwrap_or(-1),
    )
}

const EXAMPLE: &str = "p=2\nseq 1 0 0 0\nseq 0 1 0 0\n";

#[test]
fn expand_prints_structure_table_and_conditions() {
    let (out, err, code) = run(&["expand", "-"], EXAMPLE);
    assert_eq!(code, 0, "stderr: {err}");
    assert_eq!(
        out,
        "cf: m=2 p=2 ; h=1 a=[z,0] ; h=2 a=[0,z]\n\
         terminated: no\n\
         certified_n: 4\n\
         table: k h t d v n\n\
         row: 1 1 1 1 1 1\n\
         row: 2 2 1 2 1 2\n\
         conditions: cond1=pass cond2=pass cond3=pass cond4=pass strict=yes\n"
    );
}

#[test]
fn expand_json_carries_the_same_data() {
    let (out, err, code) = run(&["expand", "-", "--format", "json"], EXAMPLE);
    assert_eq!(code, 0, "stderr: {err}");
    let doc: serde_json::Value = serde_json::from_str(&out).expect("valid json");
    assert_eq!(doc["p"], 2);
    assert_eq!(doc["m"], 2);
    assert_eq!(doc["cf"], "m=2 p=2 ; h=1 a=[z,0] ; h=2 a=[0,z]");
    assert_eq!(doc["steps"][0]["h"], 1);
    assert_eq!(doc["steps"][0]["a"][0], "z");
    assert_eq!(doc["steps"][1]["h"], 2);
    assert_eq!(doc["steps"][1]["a"][1], "z");
    assert_eq!(doc["quantities"]["d"], serde_json::json!([1, 2]));
    assert_eq!(doc["quantities"]["n"], serde_json::json!([1, 2]));
    assert_eq!(doc["terminated"], false);
    assert_eq!(doc["certified_n"], 4);
    assert_eq!(doc["conditions"]["strict"], true);
}

#[test]
fn expand_reduces_polynomial_part() {
    let (out, _, code) = run(&["expand", "-"], "p=2\nseries 1@1 1@0 1@-1\n");
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "cf: m=1 p=2 ; h=1 a=[z]\n\
         integer_part: [z+1]\n\
         terminated: yes\n\
         certified_n: unbounded\n\
         table: k h t d v n\n\
         row: 1 1 1 1 1 1\n\
         conditions: cond1=pass cond2=pass cond3=pass cond4=pass strict=yes\n"
    );
}

#[test]
fn expand_of_zero_is_the_empty_structure() {
    let (out, _, code) = run(&["expand", "-"], "p=2\nseq 0 0 0\nseq 0 0 0\n");
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "cf: m=2 p=2\n\
         terminated: no\n\
         certified_n: 3\n\
         table: k h t d v n\n\
         conditions: cond1=pass cond2=pass cond3=pass cond4=pass strict=yes\n"
    );
}

#[test]
fn strict_strategy_terminates_on_an_exact_fraction() {
    let input = "p=2\nm=2\nseries 1@-1 1@-2\nseries 1@-2\n";
    let (out, _, code) = run(&["expand", "-", "--strategy", "strict"], input);
    assert_eq!(code, 0);
    assert!(out.contains("cf: m=2 p=2 ; h=1 a=[z+1,0] ; h=2 a=[1,z+1]\n"));
    assert!(out.contains("terminated: yes\n"));
    assert!(out.contains("certified_n: unbounded\n"));
}

#[test]
fn synth_prints_the_complexity_ladder() {
    let (out, _, code) = run(&["synth", "-"], "p=2\nseq 1 1 0 1 1 0\n");
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "1 1 z+1\n\
         2 1 z+1\n\
         3 2 z^2+z+1\n\
         4 2 z^2+z+1\n\
         5 2 z^2+z+1\n\
         6 2 z^2+z+1\n"
    );
}

#[test]
fn synth_oracle_marks_agreement_per_prefix() {
    let (out, _, code) = run(&["synth", "-", "--oracle"], "p=2\nseq 1 1 0 1 1 0\n");
    assert_eq!(code, 0);
    for line in out.lines() {
        assert!(line.ends_with("agree"), "line without marker: {line}");
    }
    assert_eq!(out.lines().count(), 6);
}

#[test]
fn verify_passes_a_strict_structure() {
    let input = "cf: m=2 p=2 ; h=1 a=[z,0] ; h=2 a=[0,z]\n";
    let (out, _, code) = run(&["verify", "-"], input);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "check conditions: pass - strict\n\
         check degrees: pass - 3 denominators match\n\
         check precision: pass - 2 of 2 confirmed\n\
         check best_approximation: pass - ladder confirmed to degree 3\n\
         check round_trip: pass - re-expansion reproduces the steps\n\
         verdict: pass\n"
    );
}

#[test]
fn verify_flags_a_condition_violation() {
    let input = "cf: m=2 p=2 ; h=1 a=[z,z^3] ; h=1 a=[z,0]\n";
    let (out, _, code) = run(&["verify", "-"], input);
    assert_eq!(code, 1);
    assert!(out.contains("check conditions: fail - condition 3 fails (first violation at step 1)\n"));
    assert!(out.contains("verdict: fail\n"));
}

#[test]
fn verify_checks_rows_against_a_given_structure() {
    let input = "p=2\nseq 1 0 0 0 1\nseq 0 1 0 0 0\ncf: m=2 p=2 ; h=1 a=[z,0] ; h=2 a=[0,z]\n";
    let (out, _, code) = run(&["verify", "-", "--jobs", "3"], input);
    assert_eq!(code, 0);
    assert!(out.contains(
        "check round_trip: pass - series is compatible with the structure; \
         re-expansion reproduces the steps\n"
    ));
    assert!(out.ends_with("verdict: pass\n"));
}

#[test]
fn verify_refuses_oversized_enumeration() {
    let input = "cf: m=2 p=2 ; h=1 a=[z,0] ; h=2 a=[0,z]\n";
    let (out, err, code) = run(&["verify", "-", "--oracle-degree", "60"], input);
    assert_eq!(code, 2);
    assert_eq!(out, "");
    assert_eq!(
        err,
        "error: refusing to enumerate 2^60 denominators (guard 2^24); lower --oracle-degree\n"
    );
}

#[test]
fn missing_field_is_a_usage_error() {
    let (out, err, code) = run(&["expand", "-"], "seq 1 0 1\n");
    assert_eq!(code, 2);
    assert_eq!(out, "");
    assert_eq!(
        err,
        "error: field characteristic required: pass --p or a p= header\n"
    );
}

#[test]
fn bad_symbol_is_reported_by_name_and_line() {
    let (_, err, code) = run(&["expand", "-"], "p=2\nseq 1 2 0\n");
    assert_eq!(code, 2);
    assert_eq!(
        err,
        "error: parse error: line 2: symbol \"2\" is not a residue mod 2\n"
    );
}

#[test]
fn unreadable_file_is_a_usage_error() {
    let (_, err, code) = run(&["expand", "/nonexistent-mcf-input"], "");
    assert_eq!(code, 2);
    assert!(err.starts_with("error: cannot read /nonexistent-mcf-input:"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let first = run(&["expand", "-", "--format", "json"], EXAMPLE);
    let second = run(&["expand", "-", "--format", "json"], EXAMPLE);
    assert_eq!(first, second);
    let third = run(&["verify", "-"], "cf: m=2 p=2 ; h=1 a=[z,0] ; h=2 a=[0,z]\n");
    let fourth = run(&["verify", "-"], "cf: m=2 p=2 ; h=1 a=[z,0] ; h=2 a=[0,z]\n");
    assert_eq!(third, fourth);
}

#[test]
fn parallel_and_serial_verification_agree() {
    let input = "cf: m=2 p=2 ; h=1 a=[z,0] ; h=2 a=[0,z]\n";
    let serial = run(&["verify", "-", "--jobs", "1"], input);
    let parallel = run(&["verify", "-", "--jobs", "4"], input);
    assert_eq!(serial, parallel);
}
