//! End-to-end runs of the `fptlab` binary: outputs, exit codes, JSON shapes
//! and corpus handling.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn fptlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fptlab"))
        .args(args)
        .env_remove("FPTLAB_EMAX")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn temp_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn sum_threshold_with_profile() {
    let o = fptlab(&[
        "--json", "fpt", "ts", "--prime", "5", "--a1", "1/2", "--a2", "1/3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["value"], "4/5");
    assert_eq!(v["classification"], "P_POWER_DENOMINATOR");
    assert_eq!(v["L"], 1);
    assert_eq!(v["d"], 1);
}

#[test]
fn three_component_threshold_at_97() {
    let o = fptlab(&["fpt", "ts", "--prime", "97", "--a1", "3/16", "--a2", "1/8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("5/16"), "{}", stdout(&o));
}

#[test]
fn sum_threshold_verified_against_nu() {
    let o = fptlab(&[
        "fpt", "ts", "--prime", "5", "--a1", "1/2", "--a2", "1/3", "--verify", "x^2", "y^3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn inapplicable_sum_exits_2() {
    let o = fptlab(&["fpt", "ts", "--prime", "5", "--a1", "2/3", "--a2", "2/3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).trim(), "error: theorem inapplicable: a1+a2 > 1");

    let o = fptlab(&[
        "--json", "fpt", "ts", "--prime", "5", "--a1", "2/3", "--a2", "2/3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"]["kind"], "theorem_inapplicable");
}

#[test]
fn malformed_input_exits_3() {
    let o = fptlab(&[
        "fpt", "ts", "--prime", "5", "--a1", "one half", "--a2", "1/3",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = fptlab(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(3));
    let o = fptlab(&["fpt", "ts", "--prime", "6", "--a1", "1/2", "--a2", "1/3"]);
    assert_eq!(o.status.code(), Some(3));
    let o = fptlab(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn nu_of_the_cusp() {
    let o = fptlab(&[
        "--json",
        "nu",
        "--prime",
        "5",
        "--e",
        "1",
        "--poly",
        "x^2 + y^3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["nu"], 3);
}

#[test]
fn monomial_and_diagonal_thresholds() {
    let o = fptlab(&["--json", "fpt", "monomial", "--exps", "2,3,4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["value"], "1/4");
    let o = fptlab(&["--json", "fpt", "diagonal", "--degs", "2,3", "--prime", "7"]);
    assert_eq!(json(&o)["value"], "5/6");
}

#[test]
fn frobenius_root_of_a_power() {
    let o = fptlab(&[
        "frobenius-root",
        "--prime",
        "3",
        "--e",
        "1",
        "--ideal",
        "x^4; y^12",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("x") && stdout(&o).contains("y^4"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn sum_test_ideal_with_brute_force_check() {
    let o = fptlab(&[
        "--json",
        "test-ideal",
        "ts",
        "--prime",
        "3",
        "--g1",
        "x^4",
        "--g2",
        "y^12",
        "--a1",
        "1/4",
        "--a2",
        "1/12",
        "--brute-force-check",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["case"], "P_ADIC");
    let mut display: Vec<String> = v["display"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g.as_str().unwrap().to_string())
        .collect();
    display.sort();
    assert_eq!(display, ["x", "y^4"]);
}

#[test]
fn short_window_is_a_domain_error() {
    let args = [
        "test-ideal",
        "def",
        "--prime",
        "3",
        "--poly",
        "x^5 + z^8",
        "--c",
        "13/40",
    ];
    let o = fptlab(&[&args[..], &["--emax", "4"]].concat());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no stabilization"), "{}", stderr(&o));
    let o = fptlab(&[&args[..], &["--emax", "6"]].concat());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[x, z]"), "{}", stdout(&o));
}

#[test]
fn window_defaults_from_the_environment() {
    let run = |emax: &str| {
        Command::new(env!("CARGO_BIN_EXE_fptlab"))
            .args([
                "test-ideal",
                "def",
                "--prime",
                "3",
                "--poly",
                "x^5 + z^8",
                "--c",
                "13/40",
            ])
            .env("FPTLAB_EMAX", emax)
            .output()
            .unwrap()
    };
    assert_eq!(run("4").status.code(), Some(2));
    assert_eq!(run("8").status.code(), Some(0));
    assert_eq!(run("eight").status.code(), Some(3));
}

#[test]
fn bundled_corpus_passes() {
    let o = fptlab(&["verify-corpus"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn wrong_expectation_exits_1() {
    let corpus = temp_file(
        r#"{"cases": [
            {"name": "cusp p=7", "prime": 7, "g1": "x^2", "g2": "y^3", "a1": "1/2", "a2": "1/3", "expect_fpt": "5/6"},
            {"name": "planted", "prime": 5, "g1": "x^2", "g2": "y^3", "a1": "1/2", "a2": "1/3", "expect_fpt": "5/6"}
        ]}"#,
    );
    let o = fptlab(&["verify-corpus", "--corpus", corpus.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("planted"));
    assert!(stdout(&o).contains("1 failed"));
}

#[test]
fn empty_corpus_warns() {
    let corpus = temp_file(r#"{"cases": []}"#);
    let o = fptlab(&["verify-corpus", "--corpus", corpus.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("warning: empty corpus"));
}

#[test]
fn unreadable_corpus_exits_3() {
    let corpus = temp_file("{ not json");
    let o = fptlab(&["verify-corpus", "--corpus", corpus.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

fn scan_expr() -> tempfile::NamedTempFile {
    temp_file(
        r#"{"op": "sum", "children": [
            {"op": "monomial", "exps": [2]},
            {"op": "monomial", "exps": [3]}
        ]}"#,
    )
}

#[test]
fn scan_reports_matches() {
    let expr = scan_expr();
    let o = fptlab(&[
        "--json",
        "mtw-scan",
        "--expr",
        expr.path().to_str().unwrap(),
        "--bound",
        "40",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["lct"], "5/6");
    // the cusp attains 5/6 exactly at p ≡ 1 mod 6
    assert_eq!(v["matches_found"], serde_json::json!([7, 13, 19, 31, 37]));
    assert_eq!(v["applicable"], 12);
}

#[test]
fn output_does_not_depend_on_seed_or_threads() {
    let expr = scan_expr();
    let path = expr.path().to_str().unwrap();
    let base = fptlab(&["--json", "mtw-scan", "--expr", path, "--bound", "200"]);
    assert_eq!(base.status.code(), Some(0));
    for extra in [
        ["--seed", "7"],
        ["--seed", "12345"],
        ["--threads", "1"],
        ["--threads", "4"],
    ] {
        let args = [
            &["--json", "mtw-scan", "--expr", path, "--bound", "200"][..],
            &extra[..],
        ]
        .concat();
        let o = fptlab(&args);
        assert_eq!(o.stdout, base.stdout, "{extra:?}");
    }
    let again = fptlab(&["--json", "mtw-scan", "--expr", path, "--bound", "200"]);
    assert_eq!(again.stdout, base.stdout);
}
