use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_htoeplitz")).args(args).env_remove("HTOEPLITZ_SEED").output().expect("binary runs")
}

fn validator() -> jsonschema::JSONSchema {
    let text = include_str!("../schema/run_report.schema.json");
    let schema: Value = serde_json::from_str(text).unwrap();
    jsonschema::JSONSchema::compile(&schema).expect("schema compiles")
}

/// Runs a command, validates its JSON, and returns (report, exit code).
fn report(args: &[&str]) -> (Value, i32) {
    let out = run(args);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    let schema = validator();
    if let Err(errors) = schema.validate(&json) {
        let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("{args:?} violates schema: {msgs:?}\n{json}");
    }
    let code = out.status.code().unwrap();
    assert_eq!(json["exit_status"], code);
    (json, code)
}

#[test]
fn mellin_of_log_term() {
    let (r, code) = report(&["mellin", "r^4*ln(r)"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["result"], "-1/(z+4)^2");
    let (r, code) = report(&["invmellin", "-1/(z+4)^2"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["result"], "r^4*ln(r)");
}

#[test]
fn invmellin_rejects_polynomial_parts() {
    let (r, code) = report(&["invmellin", "z/(z+2)"]);
    assert_eq!(code, 1);
    assert!(r["error"].as_str().unwrap().contains("Mellin"));
}

#[test]
fn derive_small_case() {
    let (r, code) = report(&["derive", "--L", "1", "--N", "3", "--K", "4", "--json"]);
    assert_eq!(code, 0);
    let survivors: Vec<&str> = r["result"]["survivors"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(survivors, ["C1", "C0"]);
    assert_eq!(r["result"]["verification"]["verdict"], "commutes");
    assert_eq!(r["result"]["theorem_form"], true);
}

#[test]
fn verify_reports_witness() {
    let (r, code) = report(&["verify", "--f", "z^2", "--u", "z + abar1*conj(z)", "--nmax", "8"]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["verdict"], "fails");
    let failure = &r["result"]["concrete_failures"][0];
    assert_eq!(failure["input"], "z^1");
    assert_eq!(failure["residual"]["z^2"], "-1/4*abar1");
}

#[test]
fn verify_commuting_pair() {
    let u = "z + abar1*conj(z) + abar2*conj(z)^2";
    let f = "3*z + 3*abar1*conj(z) + 3*abar2*conj(z)^2 - C0";
    let (r, code) = report(&["verify", "--f", f, "--u", u]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verdict"], "commutes");
}

#[test]
fn apply_with_oracle() {
    let (r, code) = report(&["apply", "--f", "abar1*e(-1)*r^3*ln(r)", "--v", "z^2", "--bind", "abar1=0.3+0.1i"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["oracle"]["compare"]["pass"], true);
}

#[test]
fn commutator_nonzero_is_failure() {
    let (r, code) = report(&["commutator", "--f", "z", "--u", "z + abar1*conj(z)", "--v", "zbar^2"]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["zero"], false);
    let (_, code) = report(&["commutator", "--f", "z", "--u", "z", "--v", "z^3"]);
    assert_eq!(code, 0);
}

#[test]
fn verify_paper_logs_discrepancies() {
    let (r, code) = report(&["verify-paper"]);
    assert_eq!(code, 0);
    let warnings = r["warnings"].as_array().unwrap();
    assert_eq!(warnings.len(), 2);
    assert!(warnings[0].as_str().unwrap().starts_with("f-1"));
    assert!(warnings[1].as_str().unwrap().starts_with("f-2"));
    let (r, _) = report(&["verify-paper", "--lemma", "f0"]);
    assert_eq!(r["result"]["lemmas"][0]["match"], true);
}

#[test]
fn oracle_check_is_seeded() {
    let (a, code) = report(&["oracle-check", "--cases", "20", "--seed", "7"]);
    assert_eq!(code, 0);
    let (b, _) = report(&["oracle-check", "--cases", "20", "--seed", "7"]);
    assert_eq!(a, b);
    let out = Command::new(env!("CARGO_BIN_EXE_htoeplitz"))
        .args(["oracle-check", "--cases", "20"])
        .env("HTOEPLITZ_SEED", "7")
        .output()
        .unwrap();
    let c: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(c["result"], a["result"]);
}

#[test]
fn usage_errors_exit_two() {
    let (r, code) = report(&["mellin", "z +"]);
    assert_eq!(code, 2);
    assert!(r["error"].as_str().unwrap().contains("1:4"));
    let (_, code) = report(&["verify-paper", "--lemma", "f9"]);
    assert_eq!(code, 2);
    let (_, code) = report(&["apply", "--f", "z", "--v", "q^2"]);
    assert_eq!(code, 2);
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["derive", "--L", "x"]).status.code(), Some(2));
}

#[test]
fn pretty_does_not_change_exit_status() {
    for args in [
        vec!["verify", "--f", "z^2", "--u", "z + abar1*conj(z)", "--nmax", "8"],
        vec!["derive", "--L", "2", "--N", "4", "--K", "3"],
        vec!["mellin", "r^"],
    ] {
        let plain = run(&args).status.code();
        let mut pretty = vec!["--pretty"];
        pretty.extend(&args);
        assert_eq!(run(&pretty).status.code(), plain, "{args:?}");
    }
    let out = run(&["--pretty", "mellin", "r^4*ln(r)"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "M[r^4*ln(r)](z) = -1/(z+4)^2");
}
