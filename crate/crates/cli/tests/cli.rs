//! The `forcinglab` binary end to end: flags, config files, provider
//! tables, reports and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const TABLE: &str = "\
poset V
top: 1
a < 1
b < 1
end
stage 0
G:- -> V
stage 1
G:a -> undef
G:b -> V
";

fn forcinglab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forcinglab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn small_run_writes_sorted_records_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let o = forcinglab(
        &[
            "run",
            "--suite",
            "lemma1",
            "--max-stages",
            "2",
            "--out",
            out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("lemma1"));
    assert!(table.contains("counterexamples: 0"));

    let recs = lines(&out);
    assert!(!recs.is_empty());
    let ids: Vec<&str> = recs
        .iter()
        .map(|r| r["instance"].as_str().unwrap())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(recs
        .iter()
        .all(|r| r["passed"] == true && r["suite"] == "lemma1"));

    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["exit_status"], 0);
    assert_eq!(summary["total_counterexamples"], 0);
    assert_eq!(summary["config"]["max-stages"], 2);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("sweep.conf"),
        "# small\nsuite = corollary15\nmax-stages = 1\nout = from-file.jsonl\n",
    )
    .unwrap();
    let o = forcinglab(
        &["run", "--config", "sweep.conf", "--out", "flag.jsonl"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(!dir.path().join("from-file.jsonl").exists());
    let recs = lines(&dir.path().join("flag.jsonl"));
    assert!(recs.iter().all(|r| r["suite"] == "corollary15"));
    assert!(!recs.is_empty());
}

#[test]
fn provider_table_replaces_the_census() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("v.table"), TABLE).unwrap();
    let o = forcinglab(
        &[
            "run",
            "--provider",
            "v.table",
            "--suite",
            "theorem2",
            "--out",
            "t.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let recs = lines(&dir.path().join("t.jsonl"));
    assert!(!recs.is_empty());
    assert!(recs
        .iter()
        .all(|r| r["instance"].as_str().unwrap().starts_with("V(U,V)@")));
    assert!(recs.iter().all(|r| r["passed"] == true));
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| forcinglab(args, dir.path()).status.code();
    assert_eq!(code(&["run", "--max-stages", "9"]), Some(2));
    assert_eq!(code(&["run", "--suite", "nope"]), Some(2));
    assert_eq!(code(&["run", "--config", "missing.conf"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));

    std::fs::write(dir.path().join("bad.table"), "stage 0\nG:- -> Nowhere\n").unwrap();
    assert_eq!(code(&["run", "--provider", "bad.table"]), Some(2));

    let o = forcinglab(
        &["run", "--out", "no-such-dir/r.jsonl", "--suite", "lemma1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn replay_of_a_passing_record_is_not_found() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| forcinglab(args, dir.path()).status.code();
    assert_eq!(code(&["replay", "lemma1/A2(P,P)/0/0"]), Some(2));
    assert_eq!(
        code(&["run", "--replay", "theorem2/A2(P,P)@0:1/0/0"]),
        Some(2)
    );
    assert_eq!(code(&["replay", "not-an-id"]), Some(2));
    assert_eq!(code(&["replay", "lemma1/Q9(P)/0/0"]), Some(2));
}
