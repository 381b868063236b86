use std::process::{Command, Output};

use serde_json::Value;

const ABCCA: &str = "k=3; d=1,1,2; 2,1,2";
const TRIBONACCI: &str = "k=3; d=; 1";

fn episturm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_episturm"))
        .args(args)
        .env_remove("EPISTURM_GUARD")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/report.schema.json"))
        .expect("schema file");
    let schema: Value = serde_json::from_str(&text).expect("schema parses");
    jsonschema::validator_for(&schema).expect("schema compiles")
}

/// Parses every line and checks it against the published schema.
fn json_lines(o: &Output) -> Vec<Value> {
    let validator = schema();
    stdout(o)
        .lines()
        .map(|line| {
            let v: Value = serde_json::from_str(line).expect("each line is JSON");
            if let Err(e) = validator.validate(&v) {
                panic!("schema violation {e} in {line}");
            }
            v
        })
        .collect()
}

#[test]
fn generate_prints_the_prefix() {
    let o = episturm(&["generate", "--spec", TRIBONACCI, "--length", "13"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "abacabaabacab\n");
    let o = episturm(&["generate", "--spec", TRIBONACCI, "--length", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "\n");
}

#[test]
fn parse_and_usage_errors_exit_2() {
    assert_eq!(episturm(&["generate", "--spec", "k=3; d=x", "--length", "3"]).status.code(), Some(2));
    assert_eq!(episturm(&["generate", "--spec", "k=3; d=1,0; 1", "--length", "3"]).status.code(), Some(2));
    assert_eq!(episturm(&["census", "--spec", TRIBONACCI]).status.code(), Some(2));
    assert_eq!(episturm(&["bogus"]).status.code(), Some(2));
    let o = episturm(&["blocks", "--spec", "k=3; d=x", "--n", "1", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let lines = json_lines(&o);
    assert_eq!(lines[0]["status"], "error");
}

#[test]
fn guard_exits_4() {
    let o = Command::new(env!("CARGO_BIN_EXE_episturm"))
        .args(["blocks", "--spec", TRIBONACCI, "--n", "5"])
        .env("EPISTURM_GUARD", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    let o = episturm(&["generate", "--spec", "k=2; d=; 1", "--length", "4000000000"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn blocks_show_worked_values() {
    let o = episturm(&["blocks", "--spec", ABCCA, "--n", "3", "--json", "--verify"]);
    assert!(o.status.success());
    let v = &json_lines(&o)[0];
    assert_eq!(v["payload"]["s"]["word"], "abacabacaba");
    assert_eq!(v["payload"]["s"]["length"], 11);
    assert_eq!(v["payload"]["big_d"][0]["word"], "abacaba");
    let text = stdout(&episturm(&["blocks", "--spec", TRIBONACCI, "--n", "4"]));
    assert!(text.contains("G_(4,2) = cabaabacab"));
    let text = stdout(&episturm(&["blocks", "--spec", TRIBONACCI, "--n", "0"]));
    assert!(text.contains("s_0 = a "));
}

#[test]
fn census_counts_and_verification() {
    let o = episturm(&["census", "--spec", ABCCA, "--m", "15", "--l", "2", "--json"]);
    assert!(o.status.success());
    let v = &json_lines(&o)[0];
    assert_eq!(v["payload"]["count"], 8);
    assert_eq!(v["payload"]["witnesses"], "first 8 conjugates of s_3·s_2");

    let o = episturm(&["census", "--spec", ABCCA, "--m", "22", "--l", "3", "--json"]);
    assert_eq!(json_lines(&o)[0]["payload"]["count"], 0);

    let o = episturm(&["census", "--spec", ABCCA, "--all-up-to", "58", "--l", "2", "--verify", "--json", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert!(lines.iter().all(|v| v["verification"]["passed"] == true));
    let summary = lines.last().unwrap();
    assert_eq!(summary["payload"]["kind"], "census-summary");
    assert_eq!(
        summary["payload"]["nonzero_lengths"],
        serde_json::json!([1, 2, 3, 4, 6, 7, 10, 11, 15, 21, 22, 26, 32, 43, 58])
    );
}

#[test]
fn text_and_json_agree() {
    let text = stdout(&episturm(&["census", "--spec", ABCCA, "--m", "32", "--l", "3", "--full"]));
    let json = &json_lines(&episturm(&["census", "--spec", ABCCA, "--m", "32", "--l", "3", "--full", "--json"]))[0];
    for w in json["payload"]["words"].as_array().unwrap() {
        assert!(text.contains(w.as_str().unwrap()));
    }
    assert!(text.contains("p(32;3) = 2"));
}

#[test]
fn verify_suite_passes() {
    for (spec, n) in [(TRIBONACCI, "6"), (ABCCA, "5")] {
        let o = episturm(&["verify", "--spec", spec, "--n", n, "--json"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(json_lines(&o).iter().all(|v| v["payload"]["passed"] == true));
    }
}

#[test]
fn every_command_validates() {
    let runs: [&[&str]; 5] = [
        &["generate", "--spec", ABCCA, "--length", "40", "--json"],
        &["singular", "--spec", ABCCA, "--n", "3", "--json", "--verify"],
        &["partition", "--spec", ABCCA, "--n", "2", "--length", "300", "--json", "--verify"],
        &["index", "--spec", ABCCA, "--n", "3", "--json", "--verify", "--full"],
        &["blocks", "--spec", "k=5; d=; 1", "--n", "6", "--json"],
    ];
    for args in runs {
        let o = episturm(args);
        assert!(o.status.success(), "{args:?}");
        let lines = json_lines(&o);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0]["status"], "ok");
    }
}
