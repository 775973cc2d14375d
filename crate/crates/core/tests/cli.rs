use std::path::PathBuf;
use std::process::Command;

use herm_genus::cli::{failure, run};
use herm_genus::error::Error;
use herm_genus::ideal::prime_decomposition;
use herm_genus::io::{parse_lattice, serialize_lattice};
use herm_genus::neighbour::{neighbour, verify_neighbour};
use serde_json::Value;

fn fixture() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/example.json").to_string()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn herm(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_herm-genus")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, stdout, stderr) = herm(&full);
    assert_eq!(code, 0, "{stderr}");
    serde_json::from_str(&stdout).unwrap()
}

#[test]
fn analyze_example_rows() {
    let doc = json(&["analyze", &fixture()]);
    let rows = doc["primes"].as_array().unwrap();
    let summary: Vec<(u64, &str, i64, &str, &str)> = rows
        .iter()
        .map(|r| {
            (
                r["p"].as_u64().unwrap(),
                r["kind"].as_str().unwrap(),
                r["e"].as_i64().unwrap(),
                r["jordan"].as_str().unwrap(),
                r["det_group"].as_str().unwrap(),
            )
        })
        .collect();
    assert_eq!(summary, vec![(2, "ramified", 2, "H(0)", "E1"), (17, "ramified", 1, "H(1)", "E1")]);
    assert_eq!(doc["det_profile"]["primes"], serde_json::json!([2, 17]));
    assert_eq!(doc["genus_group_order"], 4);
}

#[test]
fn analyze_rank_one_is_trivial() {
    let path = scratch("rank1.json", r#"{"d": -5, "rank": 1, "gram": [[["3","0"]]]}"#);
    let doc = json(&["analyze", path.to_str().unwrap()]);
    assert!(doc["primes"].as_array().unwrap().iter().all(|r| r["det_group"] == "E0"));
    assert_eq!(doc["det_profile"]["primes"], serde_json::json!([]));
}

#[test]
fn special_genera_example_and_round_trip() {
    let doc = json(&["special-genera", &fixture()]);
    assert_eq!(doc["group"]["order"], 4);
    assert_eq!(doc["group"]["invariant_factors"], serde_json::json!([4]));
    let reps = doc["representatives"].as_array().unwrap();
    assert_eq!(reps.len(), 4);
    for r in reps {
        let text = serde_json::to_string(&r["lattice"]).unwrap();
        let l = parse_lattice(&text).unwrap();
        let again: Value = serde_json::from_str(&serialize_lattice(&l)).unwrap();
        assert_eq!(again, r["lattice"]);
    }
}

#[test]
fn format_aliases_agree() {
    let (_, a, _) = herm(&["--format", "json", "class-group", "--d", "-17"]);
    let (_, b, _) = herm(&["--format", "machine", "class-group", "--d", "-17"]);
    let (_, c, _) = herm(&["class-group", "--d", "-17", "--format", "json-like"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let (code, text, _) = herm(&["field-info", "--d", "-17"]);
    assert_eq!(code, 0);
    assert!(text.contains("discriminant: -68"), "{text}");
}

#[test]
fn successful_commands_exit_zero() {
    for args in [
        vec!["field-info", "--d", "-1"],
        vec!["class-group", "--d", "-23"],
        vec!["neighbour", &fixture(), "--p", "3"],
        vec!["neighbour", &fixture(), "--p", "3", "--prime-index", "1", "--avoid", &fixture()],
        vec!["selftest", "--seed", "5"],
        vec!["--help"],
    ] {
        let (code, _, stderr) = herm(&args);
        assert_eq!(code, 0, "{args:?}: {stderr}");
    }
}

#[test]
fn input_errors_exit_one() {
    let not_hermitian = scratch("bad.json", r#"{"d": -17, "rank": 2, "gram": [[["102","0"],["0","1"]],[["0","1"],["0","0"]]]}"#);
    let malformed = scratch("malformed.json", "{\"d\": -17,\n \"rank\": 2,");
    let bad_number = scratch("number.json", r#"{"d": -17, "rank": 1, "gram": [[["1/0","0"]]]}"#);
    for (args, needle) in [
        (vec!["analyze", "/nonexistent/lattice.json"], "nonexistent"),
        (vec!["analyze", not_hermitian.to_str().unwrap()], "gram"),
        (vec!["analyze", malformed.to_str().unwrap()], "line 2"),
        (vec!["analyze", bad_number.to_str().unwrap()], "gram[0][0][0]"),
        (vec!["field-info", "--d", "-18"], "squarefree"),
        (vec!["neighbour", &fixture(), "--p", "4"], "not prime"),
        (vec!["selftest", "--oracle-depth", "9"], "oracle-depth"),
        (vec!["neighbour", &fixture(), "--p", "3", "--prime-index", "5"], "only 2 primes"),
        (vec!["frobnicate"], "frobnicate"),
    ] {
        let (code, stdout, stderr) = herm(&args);
        assert_eq!(code, 1, "{args:?}");
        assert!(stdout.is_empty());
        assert!(stderr.contains(needle), "{args:?}: {stderr}");
    }
}

#[test]
fn precondition_violations_exit_two() {
    let odd_scale = scratch("diag13.json", r#"{"d": -17, "rank": 2, "gram": [[["1","0"],["0","0"]],[["0","0"],["3","0"]]]}"#);
    for (args, needle) in [
        (vec!["neighbour", &fixture(), "--p", "2"], "ramified"),
        (vec!["neighbour", odd_scale.to_str().unwrap(), "--p", "3"], "L not modular at 3"),
    ] {
        let (code, _, stderr) = herm(&args);
        assert_eq!(code, 2, "{args:?}: {stderr}");
        assert!(stderr.contains(needle), "{args:?}: {stderr}");
    }
}

#[test]
fn verification_failures_exit_three() {
    // A lattice is never its own neighbour, so the postcondition check rejects it.
    let l = parse_lattice(&std::fs::read_to_string(fixture()).unwrap()).unwrap();
    let prime = prime_decomposition(l.field(), 3).remove(0);
    let err = verify_neighbour(&l, &l, &prime).unwrap_err();
    assert!(matches!(err, Error::Verification(_)), "{err}");
    let outcome = failure(&err);
    assert_eq!(outcome.code, 3);
    assert!(outcome.stderr.starts_with("error: "));

    let n = neighbour(&l, &prime, None).unwrap();
    assert!(verify_neighbour(&l, &n, &prime.conj()).is_err());
    verify_neighbour(&l, &n, &prime).unwrap();
}

#[test]
fn in_process_run_matches_binary() {
    let args = ["herm-genus", "--format", "json", "special-genera", &fixture()];
    let outcome = run(args);
    let (code, stdout, _) = herm(&args[1..]);
    assert_eq!(outcome.code, code);
    assert_eq!(outcome.stdout, stdout);
}
