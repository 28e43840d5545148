use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use cmonrw::doc::parse_cospan;
use cmonrw::sigterm::{parse_term, Signature};
use cmonrw::translate::eval_term;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn cmonrw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmonrw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("structured output is JSON")
}

fn error_record(out: &Output) -> Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    serde_json::from_str(text.lines().last().expect("an error record")).expect("error record is JSON")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_reports_the_running_example() {
    let out = cmonrw(&["check", "--cospan", &data("running_example.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("right-monogamous: true, acyclic: true\n"));

    let out = cmonrw(&["check", "--cospan", &data("running_example.json"), "--format", "structured"]);
    let v = json(&out);
    assert_eq!(v["right_monogamous"], true);
    assert_eq!(v["monogamous"], false);
    assert_eq!((v["inputs"].as_u64(), v["outputs"].as_u64()), (Some(4), Some(2)));
}

#[test]
fn translate_identity() {
    let out = cmonrw(&["translate", "--sig", &data("empty.sig"), "--term", "id_3"]);
    assert_eq!(out.status.code(), Some(0));
    let c = parse_cospan(&stdout(&out)).unwrap();
    assert!(c.iso_equal(&cmonrw::Cospan::identity(3)));
    assert_eq!(c.left, vec![0, 1, 2]);
    assert_eq!(c.right, vec![0, 1, 2]);
    assert!(c.carrier.edges.is_empty());
}

#[test]
fn translate_writes_declared_paths_only() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("out.json");
    let dot = dir.path().join("out.dot");
    let out = cmonrw(&[
        "translate",
        "--sig",
        &data("basic.sig"),
        "--term-file",
        &data("merge.term"),
        "--out",
        p(&doc),
        "--dot",
        p(&dot),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let mut names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["out.dot", "out.json"]);
    let sig = Signature::parse(&std::fs::read_to_string(data("basic.sig")).unwrap()).unwrap();
    let term = parse_term(std::fs::read_to_string(data("merge.term")).unwrap().trim(), &sig).unwrap();
    let written = parse_cospan(&std::fs::read_to_string(&doc).unwrap()).unwrap();
    assert!(written.iso_equal(&eval_term(&term, &sig).unwrap()));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
}

#[test]
fn rewrite_without_matches_is_empty() {
    for strategy in ["bfs", "leftmost"] {
        let out = cmonrw(&[
            "rewrite",
            "--rules",
            &data("g.rules"),
            "--host",
            &data("merge.term"),
            "--sig",
            &data("basic.sig"),
            "--strategy",
            strategy,
            "--format",
            "structured",
        ]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["steps"], Value::Array(vec![]));
        assert_eq!(v["normal_forms"].as_array().unwrap().len(), 1);
    }
}

#[test]
fn rewrite_all_lists_one_step_rewrites() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmonrw(&[
        "rewrite",
        "--rules",
        &data("basic.rules"),
        "--host",
        &data("chain.term"),
        "--sig",
        &data("basic.sig"),
        "--all",
        "--dot-dir",
        p(dir.path()),
        "--format",
        "structured",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rules: Vec<&str> = v["steps"].as_array().unwrap().iter().map(|s| s["rule"].as_str().unwrap()).collect();
    assert_eq!(rules, ["unfold", "fuse"]);
    assert!(v.get("normal_forms").is_none());
    assert!(dir.path().join("step_000.dot").exists() && dir.path().join("step_001.dot").exists());
}

#[test]
fn exhausted_budget_is_a_domain_error() {
    let out = cmonrw(&[
        "rewrite",
        "--rules",
        &data("basic.rules"),
        "--host",
        &data("chain.term"),
        "--sig",
        &data("basic.sig"),
        "--strategy",
        "leftmost",
        "--max-steps",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_record(&out)["code"], "StepBudgetExhausted");
}

#[test]
fn oracle_compare_agrees_on_a_merge_into_a_rule_output() {
    let rules = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(rules.path(), "rule fuse : (h ; (f + id_1)) => h\n").unwrap();
    let out = cmonrw(&[
        "oracle-compare",
        "--rules",
        p(rules.path()),
        "--host",
        &data("merge.term"),
        "--sig",
        &data("basic.sig"),
        "--format",
        "structured",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let rule = &v["rules"][0];
    assert_eq!(rule["rewriting"].as_array().unwrap().len(), 1);
    assert_eq!(rule["only_rewriting"], Value::Array(vec![]));
    assert_eq!(rule["only_oracle"], Value::Array(vec![]));
}

#[test]
fn readback_evaluates_to_the_input() {
    let out = cmonrw(&["readback", "--cospan", &data("running_example.json")]);
    assert_eq!(out.status.code(), Some(0));
    let sig = Signature::new().with("A", 1, 2).with("B", 1, 1).with("C", 1, 1);
    let term = parse_term(stdout(&out).trim(), &sig).unwrap();
    let original = parse_cospan(&std::fs::read_to_string(data("running_example.json")).unwrap()).unwrap();
    assert!(eval_term(&term, &sig).unwrap().iso_equal(&original));
}

#[test]
fn factorize_reports_levels() {
    let out = cmonrw(&["factorize", "--cospan", &data("running_example.json"), "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["levels"].as_array().unwrap().len(), 2);
    assert_eq!(v["pi"], serde_json::json!([0, 1]));
}

#[test]
fn match_lists_rule_occurrences() {
    let out = cmonrw(&[
        "match",
        "--rules",
        &data("basic.rules"),
        "--host",
        &data("chain.term"),
        "--sig",
        &data("basic.sig"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("unfold: edges [0]"));
    assert!(text.contains("fuse: edges [1, 2]"));
}

#[test]
fn export_draws_graph_documents() {
    let out = cmonrw(&["export", "--cospan", &data("running_example.json")]);
    assert_eq!(out.status.code(), Some(0));
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph") && dot.contains("cluster_inputs"));
}

#[test]
fn syntax_errors_carry_a_location() {
    let out = cmonrw(&["check", "--term", "(f ; ", "--sig", &data("basic.sig")]);
    assert_eq!(out.status.code(), Some(1));
    let rec = error_record(&out);
    assert_eq!(rec["code"], "SyntaxError");
    assert_eq!(rec["location"]["line"], 1);
}

#[test]
fn missing_files_are_io_failures() {
    let out = cmonrw(&["check", "--cospan", "/nonexistent/graph.json"]);
    assert_eq!(out.status.code(), Some(1));
    let rec = error_record(&out);
    assert_eq!(rec["code"], "IoFailure");
    assert_eq!(rec["path"], "/nonexistent/graph.json");
}

#[test]
fn usage_errors_exit_with_two() {
    let out = cmonrw(&["check"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["code"], "Usage");
    let out = cmonrw(&["translate", "--term", "id_1", "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let args = [
        "rewrite",
        "--rules",
        &data("basic.rules"),
        "--host",
        &data("chain.term"),
        "--sig",
        &data("basic.sig"),
        "--all",
        "--format",
        "structured",
    ];
    assert_eq!(cmonrw(&args).stdout, cmonrw(&args).stdout);
}
