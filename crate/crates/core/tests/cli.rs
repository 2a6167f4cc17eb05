use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const TWO_CHAIN_CONSTANTS: &str = r#"{
  "elements": ["0", "1"],
  "order": {"covers": [["0", "1"]]},
  "maps": {"lo": {"0": "0", "1": "0"}, "hi": {"0": "1", "1": "1"}}
}"#;

const DIAMOND: &str = r#"{
  "elements": ["bot", "a", "b", "top"],
  "order": {"covers": [["bot", "a"], ["bot", "b"], ["a", "top"], ["b", "top"]]},
  "maps": {
    "ja": {"bot": "a", "a": "a", "b": "top", "top": "top"},
    "jb": {"bot": "b", "a": "top", "b": "b", "top": "top"}
  }
}"#;

fn jointfix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jointfix"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn solve_reports_fix_set_and_least() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "d.json", DIAMOND);
    let out = jointfix(&["solve", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["fix_set"], serde_json::json!(["top"]));
    assert_eq!(r["least"], "top");
    assert_eq!(r["method"], "orbit-suprema");
    assert!(r["instance_digest"]
        .as_str()
        .unwrap()
        .starts_with("sha256:"));
}

#[test]
fn round_robin_strategy_matches_closure() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "d.json", DIAMOND);
    let a = json(&jointfix(&["solve", file.to_str().unwrap()]));
    let b = json(&jointfix(&[
        "solve",
        file.to_str().unwrap(),
        "--strategy",
        "round-robin",
    ]));
    assert_eq!(a["fix_set"], b["fix_set"]);
    assert_eq!(b["method"], "round-robin");
}

#[test]
fn non_commuting_family_is_refused_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "c.json", TWO_CHAIN_CONSTANTS);
    let out = jointfix(&["solve", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["error"]["kind"], "precondition-violated:not-commutative");
    assert_eq!(r["error"]["witness"]["at"], "0");
}

#[test]
fn skipping_preconditions_exposes_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "c.json", TWO_CHAIN_CONSTANTS);
    let out = jointfix(&[
        "solve",
        file.to_str().unwrap(),
        "--unsafe-skip-preconditions",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["fix_set"], serde_json::json!(["1"]));
    let oracle = json(&jointfix(&["oracle", file.to_str().unwrap()]));
    assert_eq!(oracle["brute_force"], serde_json::json!([]));
}

#[test]
fn family_selection_restricts_members() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "c.json", TWO_CHAIN_CONSTANTS);
    let out = jointfix(&["solve", file.to_str().unwrap(), "--family", "lo"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["family"], serde_json::json!(["lo"]));
    assert_eq!(r["fix_set"], serde_json::json!(["0"]));
}

#[test]
fn kleene_and_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "d.json", DIAMOND);
    let k = json(&jointfix(&[
        "kleene",
        file.to_str().unwrap(),
        "--map",
        "ja",
    ]));
    assert_eq!(k["kleene"]["trace"], serde_json::json!(["bot", "a"]));
    let k = json(&jointfix(&[
        "kleene",
        file.to_str().unwrap(),
        "--map",
        "ja",
        "--start",
        "b",
    ]));
    assert_eq!(k["kleene"]["fixpoint"], "top");
    let s = json(&jointfix(&["seeds", file.to_str().unwrap(), "--map", "jb"]));
    assert_eq!(s["fix_set"], serde_json::json!(["b", "top"]));
}

#[test]
fn check_reports_properties() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "c.json", TWO_CHAIN_CONSTANTS);
    let out = jointfix(&["check", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["properties"]["commutative"], false);
    assert_eq!(r["properties"]["commutation_witness"]["at"], "0");
    assert_eq!(r["properties"]["maps"][0]["isotone"], true);
    assert_eq!(
        r["properties"]["maps"][0]["fixed_points"],
        serde_json::json!(["1"])
    );
}

#[test]
fn gen_is_deterministic_and_canonical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = jointfix(&[
            "gen",
            "--kind",
            "powerset",
            "--n",
            "3",
            "--rng-seed",
            "11",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["meta"]["rng"], "splitmix64");
    assert_eq!(doc["meta"]["rng_seed"], 11);
    assert_eq!(doc["elements"].as_array().unwrap().len(), 8);
}

#[test]
fn usage_and_io_errors_exit_two() {
    assert_eq!(jointfix(&["bogus"]).status.code(), Some(2));
    assert_eq!(jointfix(&["solve"]).status.code(), Some(2));
    assert_eq!(
        jointfix(&["solve", "/nonexistent/instance.json"])
            .status
            .code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", "{\"elements\": [\"a\",");
    let out = jointfix(&["solve", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let cyclic = write(
        dir.path(),
        "cyclic.json",
        r#"{"elements": ["a", "b"], "order": {"covers": [["a", "b"], ["b", "a"]]}, "maps": {"f": {"a": "a", "b": "b"}}}"#,
    );
    let out = jointfix(&["check", cyclic.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("order.covers"));
}

#[test]
fn help_exits_zero() {
    let out = jointfix(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("solve"));
}
