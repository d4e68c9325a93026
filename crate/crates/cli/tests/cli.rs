use std::io::Write;
use std::process::{Command, Output, Stdio};

use m0n_core::{classify, parse_monomial, Classification};
use serde_json::Value;

const EXAMPLE: &str =
    "n=9; d(1,2,3|4,5,6,7,8,9)^3 * d(1,2,3,4,5|6,7,8,9) * d(1,2,3,4,5,8,9|6,7) * d(1,2,3,4,5,6,7|8,9)";

fn m0n(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_m0n")).args(args).output().expect("binary runs")
}

fn m0n_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_m0n"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

#[test]
fn keel_example_is_zero() {
    let o = m0n(&["eval", "n=5; d(1,2|3,4,5) * d(1,4|2,3,5)"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["classification"], "ZeroByKeel");
    assert_eq!(r["value"], "0");
    assert_eq!(r["sign"], Value::Null);
}

#[test]
fn example_report_has_fixed_field_order() {
    let o = m0n(&["eval", "--oracle", EXAMPLE]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let keys = ["\"input\"", "\"classification\"", "\"value\"", "\"sign\""];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{text}");
    let r = json(&o);
    assert_eq!(r["classification"], "TreeMonomial");
    assert_eq!(r["value"], "2");
    assert_eq!(r["sign"], 1);
}

#[test]
fn empty_monomial_and_plain_output() {
    assert_eq!(json(&m0n(&["eval", "n=3; 1"]))["value"], "1");
    assert_eq!(stdout(&m0n(&["eval", "--plain", "n=5; d(1,2|3,4,5)^2"])), "-1\n");
    assert_eq!(stdout(&m0n(&["oracle", "--plain", "n=5; d(1,2|3,4,5)^2"])), "-1\n");
}

#[test]
fn oracle_subcommand_matches_eval_report() {
    let a = m0n(&["eval", EXAMPLE]);
    let b = m0n(&["oracle", EXAMPLE]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn trace_stages() {
    let r = json(&m0n(&["eval", "--trace", EXAMPLE]));
    let names: Vec<&str> = r["stages"].as_array().unwrap().iter().map(|s| s["stage"].as_str().unwrap()).collect();
    assert_eq!(&names[..4], ["loaded", "weighted", "redundancy", "forest"]);
    assert_eq!(*names.last().unwrap(), "last");

    let r = json(&m0n(&["oracle", "--trace", EXAMPLE]));
    assert!(!r["stages"].as_array().unwrap().is_empty());
    assert!(json(&m0n(&["eval", EXAMPLE])).get("stages").is_none());
}

#[test]
fn parse_error_exits_2_with_position() {
    let o = m0n(&["eval", "n=5; d(1,2|3,4"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("byte 14"), "{err}");
    assert!(err.lines().last().unwrap().ends_with('^'));
}

#[test]
fn tree_json_of_example() {
    let o = m0n(&["tree", EXAMPLE]);
    assert_eq!(o.status.code(), Some(0));
    let t = json(&o);
    let labels: Vec<Vec<u64>> = t["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["labels"].as_array().unwrap().iter().map(|l| l.as_u64().unwrap()).collect())
        .collect();
    assert_eq!(labels, vec![vec![1, 2, 3], vec![4, 5], vec![], vec![8, 9], vec![6, 7]]);
    let mut mult: Vec<u64> =
        t["edges"].as_array().unwrap().iter().map(|e| e["multiplicity"].as_u64().unwrap()).collect();
    mult.sort();
    assert_eq!(mult, vec![1, 1, 1, 3]);
}

#[test]
fn tree_single_vertex_and_dot() {
    let t = json(&m0n(&["tree", "n=3; 1"]));
    assert_eq!(t["vertices"].as_array().unwrap().len(), 1);
    assert!(t["edges"].as_array().unwrap().is_empty());
    let dot = stdout(&m0n(&["tree", "--format", "dot", EXAMPLE]));
    assert!(dot.starts_with("graph loaded_tree {"));
    assert_eq!(dot.matches("--").count(), 4);
}

#[test]
fn tree_rejects_crossing_input() {
    let o = m0n(&["tree", "n=5; d(1,2|3,4,5) * d(1,4|2,3,5)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("cross"));
}

#[test]
fn random_outputs() {
    assert_eq!(stdout(&m0n(&["random", "3", "--count", "1", "--seed", "0"])), "n=3; 1\n");
    assert_eq!(m0n(&["random", "2", "--count", "1", "--seed", "0"]).status.code(), Some(2));

    let o = m0n(&["random", "12", "--count", "100", "--seed", "7"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 100);
    for l in &lines {
        let c = classify(&parse_monomial(l).unwrap());
        assert!(matches!(c, Classification::TreeMonomial | Classification::Clever), "{l}");
    }
    assert_eq!(text, stdout(&m0n(&["random", "12", "--count", "100", "--seed", "7"])));
}

#[test]
fn batch_oracle_over_random_never_disagrees() {
    let mut input = String::new();
    for n in 3..=11 {
        input.push_str(&stdout(&m0n(&["random", &n.to_string(), "--count", "40", "--seed", "11"])));
    }
    let o = m0n_stdin(&["eval", "--oracle", "--stdin"], &input);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let reports: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), input.lines().count());
    for (line, r) in input.lines().zip(&reports) {
        assert_eq!(r["input"], line);
    }
}

#[test]
fn batch_keeps_order_and_reports_errors_inline() {
    let input = format!("n=3; 1\nnot a monomial\n\n{EXAMPLE}\n");
    let o = m0n_stdin(&["eval", "--stdin", "--plain"], &input);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "1");
    assert!(lines[1].starts_with("error:"));
    assert_eq!(lines[2], "2");
}

#[test]
fn file_input() {
    let dir = std::env::temp_dir().join(format!("m0n-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("input.txt");
    std::fs::write(&path, format!("# comment\n{EXAMPLE}\nn=5; d(1,2|3,4,5)^2\n")).unwrap();
    let o = m0n(&["eval", "--plain", "--file", path.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(stdout(&o), "2\n-1\n");
}

#[test]
fn output_is_deterministic() {
    let input = stdout(&m0n(&["random", "10", "--count", "50", "--seed", "3"]));
    let a = m0n_stdin(&["eval", "--stdin", "--trace"], &input);
    let b = m0n_stdin(&["eval", "--stdin", "--trace"], &input);
    assert_eq!(a.stdout, b.stdout);
}
