//! End-to-end tests of the binary: exit codes, output formats, byte-level
//! determinism across runs and thread counts, and witness replay.

use std::path::PathBuf;
use std::process::{Command, Output};

fn pimax() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pimax"))
}

fn run(args: &[&str]) -> Output {
    pimax().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

/// Strip the timing and version fields, which are excluded from the
/// determinism comparison.
fn normalized_json_stream(text: &str) -> Vec<String> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let mut v: serde_json::Value = serde_json::from_str(line).expect("json line");
            let obj = v.as_object_mut().expect("object");
            obj.remove("elapsed_ms");
            obj.remove("artifact_version");
            serde_json::to_string(&v).expect("serializes")
        })
        .collect()
}

#[test]
fn full_battery_is_deterministic_across_runs_and_thread_counts() {
    let first = run(&["verify", "all", "--p", "11", "--format", "json"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = run(&["verify", "all", "--p", "11", "--format", "json"]);
    assert!(second.status.success());
    let single = run(&["verify", "all", "--p", "11", "--format", "json", "--threads", "1"]);
    assert!(single.status.success());
    let quad = run(&["verify", "all", "--p", "11", "--format", "json", "--threads", "4"]);
    assert!(quad.status.success());

    let a = normalized_json_stream(&stdout(&first));
    let b = normalized_json_stream(&stdout(&second));
    let c = normalized_json_stream(&stdout(&single));
    let d = normalized_json_stream(&stdout(&quad));
    assert_eq!(a.len(), 13, "one certificate per check");
    assert_eq!(a, b, "two identical runs diverged");
    assert_eq!(a, c, "single-threaded run diverged");
    assert_eq!(a, d, "four-thread run diverged");
    println!("criterion 12 (determinism): PASS — 13 certificates byte-identical modulo elapsed_ms across 4 runs");

    // every certificate passed and carries the expected identifiers
    let ids: Vec<String> = stdout(&first)
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            assert_eq!(v["status"], "pass", "{l}");
            assert_eq!(v["parameters"]["p"], 11);
            v["check_id"].as_str().unwrap().to_string()
        })
        .collect();
    assert_eq!(
        ids,
        vec![
            "presentation",
            "character",
            "irreducibility",
            "aut-l",
            "normalizer-gl",
            "aut-g",
            "suzuki",
            "wh-sweep",
            "lemma22",
            "lemma23",
            "lemma42",
            "example1",
            "example2"
        ]
    );
}

#[test]
fn unknown_check_exits_2() {
    let out = run(&["verify", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inadmissible_prime_exits_3() {
    let out = run(&["verify", "lemma42", "--p", "7"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["verify", "presentation", "--p", "13"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["verify", "character", "--p", "9"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn materialization_overflow_exits_4() {
    let out = run(&["verify", "aut-g", "--p", "11", "--max-materialize", "100"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn refused_hypotheses_exit_1() {
    // the Sylow-2 battery is specific to π = {2,3}
    let out = run(&["verify", "lemma42", "--p", "11", "--pi", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("REFUSED"), "{text}");
}

#[test]
fn character_at_23_reports_the_root_values() {
    let out = run(&["verify", "character", "--p", "23", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["status"], "pass");
    assert_eq!(v["witness_data"]["order7_values"], serde_json::json!([9, 13]));
}

#[test]
fn out_file_and_replay_round_trip() {
    let dir = std::env::temp_dir();
    let path: PathBuf = dir.join(format!("pimax-cli-test-{}.jsonl", std::process::id()));
    let path_str = path.to_str().unwrap();
    let out = run(&[
        "verify",
        "lemma42",
        "--p",
        "11",
        "--format",
        "json",
        "--out",
        path_str,
    ]);
    assert!(out.status.success());
    let contents = std::fs::read_to_string(&path).unwrap();
    assert_eq!(contents.lines().count(), 1);

    let replay = run(&["verify", "lemma42", "--replay", path_str]);
    assert!(replay.status.success(), "{}", String::from_utf8_lossy(&replay.stderr));
    let text = stdout(&replay);
    assert!(text.contains("replay lemma42 @ p=11: VERIFIED"), "{text}");

    // corrupt the witness: claim one intersection has order 8
    let tampered = contents.replace("\"intersection_order\":24", "\"intersection_order\":8");
    assert_ne!(tampered, contents, "expected an order-24 intersection in the payload");
    std::fs::write(&path, &tampered).unwrap();
    let replay = run(&["verify", "lemma42", "--replay", path_str]);
    assert_eq!(replay.status.code(), Some(1));
    assert!(stdout(&replay).contains("MISMATCH"), "{}", stdout(&replay));
    let _ = std::fs::remove_file(&path);
}

#[test]
fn text_format_is_the_default_and_readable() {
    let out = run(&["verify", "suzuki", "--p", "11"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("suzuki @ p=11 pi={2,3}: PASS"), "{text}");
}
