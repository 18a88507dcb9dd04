use std::process::Command;

use c2forms_cli::{run, RunOutput, OUTPUT_SCHEMA};
use jsonschema::JSONSchema;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use serde_json::Value;

const PHI: &str = "(x*A1)*[1, x^-2*y^-1 + 1] + (y^-1 + x*A1)*[1, x^-3*(y^-2 + x*y^-1 + x^3)]";

fn c2(args: &[&str]) -> RunOutput {
    run(std::iter::once("c2forms").chain(args.iter().copied()))
}

fn json_of(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--output", "json"];
    full.extend_from_slice(args);
    let out = c2(&full);
    (out.code, serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout)))
}

fn validate(v: &Value) {
    let schema: Value = serde_json::from_str(OUTPUT_SCHEMA).unwrap();
    let compiled = JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(v) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| e.to_string()).collect(),
    };
    assert!(msgs.is_empty(), "schema violations: {msgs:?}\n{v}");
}

#[test]
fn verify_single_step() {
    let out = c2(&["verify", "star", "--step", "norms"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("norms: proven"));
}

#[test]
fn verify_full_run_needs_allow_assumed() {
    let (code, v) = json_of(&["verify", "star", "--jobs", "4"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "assumed");
    validate(&v);
    assert_eq!(v["result"]["summary"]["assumed"], 1);
    assert!(v["result"]["steps"][0].get("runtime_ms").is_none());

    let out = c2(&["verify", "star", "--allow-assumed", "--jobs", "4", "--timings"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("lem2ex-conclusion: assumed ("));
}

#[test]
fn non_isometric_scaling_is_refuted() {
    let args = ["rewrite", "--mode", "isometry", "Q[1,x^-2*y^-1]", "(x*(1+y^2*x^3+x*y))*Q[1,x^-2*y^-1]"];
    let out = c2(&args);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("status: refuted"));
    let (code, v) = json_of(&args);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "refuted");
    validate(&v);
}

#[test]
fn arf_of_phi_over_k() {
    let out = c2(&["--ext", "as:x", "form", "arf", PHI]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("arf: x^-3*y^-2"), "{}", out.stdout);
}

#[test]
fn usage_and_input_errors_exit_2() {
    for args in [
        vec!["bogus"],
        vec!["--base-degree", "3", "verify", "star"],
        vec!["form", "arf", "[1,"],
        vec!["verify", "star", "--step", "no-such-step"],
        vec!["--ext", "cube:x", "form", "arf", "[1,x]"],
        vec!["transfer", "--step", "1", "[1,x]"],
    ] {
        let out = c2(&args);
        assert_eq!(out.code, 2, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let (code, v) = json_of(&["form", "arf", "[1,"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "error");
    validate(&v);
}

#[test]
fn text_and_json_agree() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["form", "normalize", "<1,x> + [x,y]"],
        vec!["form", "i2", "[1,x]+[1,x]"],
        vec!["form", "i2", "[1,x]"],
        vec!["form", "clifford", "[x,y]+[1,1]"],
        vec!["residues", "--val", "y", "x*[1,y^-1]+[1,x]"],
        vec!["--ext", "as:x", "transfer", "--step", "1", "A1*[1,y]"],
        vec!["rewrite", "--mode", "witt", "[1,x]", "[1,x]"],
        vec!["pcex2", "0", "x", "y^-1", "x", "x^-2*y^-1+1", "x^-3*(y^-2 + x*y^-1 + x^3)"],
        vec!["kernel-gens", "sqrt:x,as:y^-1", "2"],
        vec!["verify", "star", "--step", "corexce-arf", "--step", "pcex2"],
    ];
    for args in cases {
        let text = c2(&args);
        let (code, v) = json_of(&args);
        assert_eq!(text.code, code, "{args:?}");
        validate(&v);
        let status = v["status"].as_str().unwrap();
        assert!(text.stdout.ends_with(&format!("status: {status}\n")), "{args:?}: {}", text.stdout);
    }
}

#[test]
fn schema_command_prints_the_schema() {
    let out = c2(&["schema"]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["title"], "c2forms JSON output");
}

#[test]
fn binary_honours_env_and_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_c2forms");
    let out = Command::new(bin)
        .env("C2FORMS_BASE_DEGREE", "4")
        .args(["--output", "json", "verify", "star", "--step", "norms"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["instance"]["base_field"], "GF(16)");
    let bad = Command::new(bin).args(["form", "arf"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

fn coeff() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["1", "x", "y", "x^-1", "x*y + 1", "x^2*y^-3", "(1 + x)^-1", "y^3 + x^-2"])
        .prop_map(String::from)
}

fn block() -> impl Strategy<Value = String> {
    prop_oneof![
        (coeff(), coeff()).prop_map(|(a, b)| format!("[{a}, {b}]")),
        (coeff(), coeff(), coeff()).prop_map(|(s, a, b)| format!("({s})*[{a}, {b}]")),
    ]
}

fn form_text() -> impl Strategy<Value = String> {
    (prop::collection::vec(block(), 1..4), prop::collection::vec(coeff(), 0..3)).prop_map(|(bs, sing)| {
        let mut parts = bs;
        if !sing.is_empty() {
            parts.push(format!("<{}>", sing.join(", ")));
        }
        parts.join(" + ")
    })
}

fn normalize(text: &str) -> String {
    let out = c2(&["form", "normalize", text]);
    assert_eq!(out.code, 0, "{text}: {}", out.stderr);
    out.stdout.lines().next().unwrap().to_string()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn printed_forms_parse_back_to_themselves(text in form_text()) {
        let once = normalize(&text);
        prop_assert_eq!(normalize(&once), once);
    }
}

#[test]
fn printed_forms_round_trip_through_the_binary() {
    let bin = env!("CARGO_BIN_EXE_c2forms");
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = form_text();
    for _ in 0..20 {
        let text = strategy.new_tree(&mut runner).unwrap().current();
        let first = normalize(&text);
        let out = Command::new(bin).args(["form", "normalize", &first]).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8(out.stdout).unwrap().lines().next().unwrap(), first);
    }
}
