use std::process::{Command, Output};

use serde_json::Value;

fn qpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_lines(path: &std::path::Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn identity_a1_order_100() {
    let o = qpi(&["verify", "identity", "a1", "--order", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS  a1"));
}

#[test]
fn classical_congruence_four_passes() {
    let o = qpi(&["verify", "congruence", "cong_classical", "--n-list", "5,7,11,13"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 4);
}

#[test]
fn unknown_name_is_usage_error() {
    let o = qpi(&["verify", "identity", "nosuch", "--order", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown name"));
    assert_eq!(qpi(&["verify", "transform", "quartic", "--battery"]).status.code(), Some(2));
    assert_eq!(qpi(&["eval", "numeric", "a1", "--q", "0"]).status.code(), Some(2));
    assert_eq!(qpi(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn failing_record_exits_one() {
    // the constant factor vanishes, so the record is an error
    let o = qpi(&["verify", "transform", "quadratic", "--spec", "s=1,a=1,d=q,b=q"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("ERROR"));
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    let o = qpi(&["verify", "congruence", "cong_q4_half", "--n-max", "13", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&path);
    assert_eq!(lines[0]["type"], "header");
    assert_eq!(lines[0]["schema_version"], 1);
    let records: Vec<&Value> = lines.iter().filter(|l| l["type"] == "record").collect();
    let names: Vec<&str> = records.iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["cong_q4_half/n=1", "cong_q4_half/n=5", "cong_q4_half/n=7", "cong_q4_half/n=11", "cong_q4_half/n=13"]);
    assert!(records.iter().all(|r| r["status"] == "pass"));
    let summary = lines.last().unwrap();
    assert_eq!(summary["type"], "summary");
    assert_eq!(summary["passed"], 5);
    for l in &lines {
        let again: Value = serde_json::from_str(&serde_json::to_string(l).unwrap()).unwrap();
        assert_eq!(&again, l);
    }
}

#[test]
fn reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = qpi(&["verify", "wz", "all", "--nmax", "4", "--kmin", "-4", "--kmax", "4", "--json", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let mut lines = json_lines(&path);
        // the output path and wall-clock time vary
        lines[0].as_object_mut().unwrap().remove("command");
        lines.last_mut().unwrap().as_object_mut().unwrap().remove("duration_ms");
        lines
    };
    assert_eq!(run("a.jsonl"), run("b.jsonl"));
}

#[test]
fn thread_cap_does_not_change_results() {
    let one = Command::new(env!("CARGO_BIN_EXE_qpi"))
        .args(["verify", "transform", "cubic", "--battery", "--order", "30"])
        .env("QPI_THREADS", "1")
        .output()
        .unwrap();
    let many = qpi(&["verify", "transform", "cubic", "--battery", "--order", "30"]);
    let strip = |s: String| s.lines().filter(|l| !l.contains(" records: ")).collect::<Vec<_>>().join("\n");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(strip(stdout(&one)), strip(stdout(&many)));
}

#[test]
fn other_commands_pass() {
    for args in [
        &["verify", "iterate", "wz_q1_family", "--depth", "2", "--order", "30"][..],
        &["verify", "iterate", "wz_q3_family", "--depth", "1"],
        &["eval", "numeric", "a11", "--q", "-1/3"],
        &["limit", "pi", "ram_4pi", "--terms", "200"],
    ] {
        let o = qpi(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
    }
    assert_eq!(qpi(&["verify", "iterate", "wz_q3_family", "--depth", "2"]).status.code(), Some(2));
}
