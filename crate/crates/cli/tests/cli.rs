use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn llab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_llab"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    llab().args(args).output().unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn two_constants(dir: &Path) -> String {
    write(dir, "c.json", r#"{"domain_size": 3, "hypotheses": ["000", "111"]}"#)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn dims_on_two_constants() {
    let d = TempDir::new().unwrap();
    let class = two_constants(d.path());
    let out = d.path().join("r.json");
    let o = run(&["dims", "--class", &class, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["report"]["ldim"], 1);
    assert_eq!(r["report"]["tdim"], 1);
    assert_eq!(r["report"]["witness_sequence"].as_array().unwrap().len(), 1);
    assert_eq!(r["verb"], "dims");
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
    assert!(r["version"].is_string());
}

#[test]
fn game_with_empty_sample() {
    let d = TempDir::new().unwrap();
    let class = two_constants(d.path());
    let sample = write(d.path(), "s.json", "[]");
    let o = run(&["game", "--class", &class, "--sample", sample.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["report"]["mistakes"], 0);
}

#[test]
fn corrupted_oracle_is_a_fault() {
    let d = TempDir::new().unwrap();
    let class = two_constants(d.path());
    let wrong = write(d.path(), "w.json", r#"{"domain_size": 3, "hypotheses": ["000"]}"#);
    let out = d.path().join("r.json");
    let o = run(&[
        "convert",
        "--class",
        &class,
        "--oracle-class",
        wrong.to_str().unwrap(),
        "--direction",
        "leaf-to-threshold",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["status"], "fault");
    let calls = r["report"]["calls"].as_array().unwrap();
    let fault = calls.iter().find(|c| !c["fault"].is_null()).unwrap();
    assert_eq!(fault["fault"]["kind"], "contract_violation");
    assert!(fault["fault"]["witness"]["realized_by"].is_string());
}

#[test]
fn honest_conversions_pass() {
    let d = TempDir::new().unwrap();
    let class = two_constants(d.path());
    for dir in ["leaf-to-threshold", "threshold-to-leaf"] {
        let o = run(&["convert", "--class", &class, "--direction", dir, "--calls", "5"]);
        assert_eq!(o.status.code(), Some(0), "{dir}: {}", String::from_utf8_lossy(&o.stderr));
        let r: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(r["report"]["all_verified"], true);
    }
}

#[test]
fn reports_are_byte_identical() {
    let d = TempDir::new().unwrap();
    let class = two_constants(d.path());
    let a = d.path().join("a.json");
    let b = d.path().join("b.json");
    for out in [&a, &b] {
        let o = run(&["force", "--class", &class, "--learner", "majority", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    // nothing but the two reports and the class file is left behind
    assert_eq!(std::fs::read_dir(d.path()).unwrap().count(), 3);
}

#[test]
fn malformed_input_exits_one() {
    let d = TempDir::new().unwrap();
    let dup = write(d.path(), "dup.json", r#"{"domain_size": 2, "hypotheses": ["01", "01"]}"#);
    assert_eq!(run(&["dims", "--class", dup.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["dims", "--class", "/no/such/file"]).status.code(), Some(1));
    assert_eq!(run(&["dims", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn resource_guard_exits_three() {
    let d = TempDir::new().unwrap();
    let class = two_constants(d.path());
    let o = llab()
        .env("LLAB_ENUM_CAP", "2")
        .args(["split", "--class", &class, "--point", "0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["report"]["kind"], "resource_guard");
}

#[test]
fn split_and_bounded() {
    let d = TempDir::new().unwrap();
    let class = two_constants(d.path());
    let o = run(&["split", "--class", &class, "--point", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["report"]["restricted_ldim"], 0);

    let o = run(&["bounded", "--class", &class, "--bound", "2", "--max-len", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["report"]["worst_case"]["mistakes"].as_u64().unwrap() <= 1);
}

#[test]
fn extract_against_soa() {
    let d = TempDir::new().unwrap();
    let class = two_constants(d.path());
    let tree = write(
        d.path(),
        "t.json",
        r#"{"label": 0, "zero": {"label": 1, "zero": "leaf", "one": "leaf"},
                        "one": {"label": 2, "zero": "leaf", "one": "leaf"}}"#,
    );
    let o = run(&["extract", "--class", &class, "--tree", tree.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["report"]["leaf_realizable"], false);
    assert_eq!(r["report"]["extraction"]["outcome"], "leaf");
}

#[test]
fn fool_then_certify() {
    let d = TempDir::new().unwrap();
    let stream = d.path().join("s.jsonl");
    let o = run(&[
        "fool",
        "--learners",
        "constant-0,constant-1,majority",
        "--fuel",
        "3",
        "--iterations",
        "5",
        "--prefix-size",
        "60",
        "--stream",
        stream.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let verdicts = r["report"]["verdicts"].as_array().unwrap();
    for v in &verdicts[..2] {
        assert_eq!(v["kind"], "forced_mistakes");
        assert_eq!(v["count"], 5);
    }
    // majority spends more than three steps once the history grows
    assert_eq!(verdicts[2]["kind"], "diverged_on_realizable");
    assert_eq!(verdicts[2]["witnesses"].as_array().unwrap().len(), 2);
    let first = std::fs::read_to_string(&stream).unwrap();
    let line: Value = serde_json::from_str(first.lines().next().unwrap()).unwrap();
    assert_eq!(line["origin"], "first-type");

    let o = run(&["certify", "--stream", stream.to_str().unwrap(), "--blocks", "3", "--prefix-size", "60"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["report"]["ok"], true);
    assert!(r["report"]["ldim"].as_i64().unwrap() <= 2);
}

#[test]
fn certify_rejects_missing_first_type() {
    let d = TempDir::new().unwrap();
    let stream = write(d.path(), "bad.jsonl", "{\"forbid\": [[0, 1], [0, 0]], \"origin\": \"block-0-value\"}\n");
    let o = run(&["certify", "--stream", stream.to_str().unwrap(), "--blocks", "2", "--prefix-size", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["report"]["violations"][0]["violation"], "ones_in_several_blocks");
}

#[test]
fn selftest_clean_and_broken() {
    let o = run(&["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 10);

    let o = run(&["selftest", "--broken-soa"]);
    assert_ne!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL  3")));

    let d = TempDir::new().unwrap();
    let a = d.path().join("a.json");
    let b = d.path().join("b.json");
    run(&["selftest", "--out", a.to_str().unwrap()]);
    run(&["selftest", "--no-memo", "--out", b.to_str().unwrap()]);
    let (ra, rb) = (report(&a), report(&b));
    assert_eq!(ra["report"]["outcomes"], rb["report"]["outcomes"]);
}
