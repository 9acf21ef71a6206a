use std::path::Path;
use std::process::{Command, Output};

fn grigorchuk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grigorchuk"))
        .args(args)
        .env_remove("GRIGORCHUK_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn word_problem_verdicts() {
    let out = grigorchuk(&["solve", "adadadad"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "identity");

    let out = grigorchuk(&["solve", "a"]);
    assert_eq!(stdout(&out).trim(), "nontrivial");

    let out = grigorchuk(&["equal", "bc", "d"]);
    assert_eq!(stdout(&out).trim(), "equal");

    let out = grigorchuk(&["order", "ab"]);
    assert_eq!(stdout(&out).trim(), "16");

    let out = grigorchuk(&["order", "ab", "--k-max", "3"]);
    assert_eq!(stdout(&out).trim(), "exceeded 3");

    let out = grigorchuk(&["reduce", "abcda"]);
    assert!(stdout(&out).starts_with("I (type II"));
}

#[test]
fn parse_errors_exit_with_2() {
    let out = grigorchuk(&["solve", "abx"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("position 2"), "{err}");

    assert_eq!(grigorchuk(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        grigorchuk(&["growth", "--radius", "99"]).status.code(),
        Some(2)
    );
    assert_eq!(grigorchuk(&["verify", "nope"]).status.code(), Some(2));
}

#[test]
fn json_output() {
    let out = grigorchuk(&["--json", "order", "ac"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["order"], 8);
    assert_eq!(v["exponent"], 3);

    let out = grigorchuk(&["portrait", "b", "--depth", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["portrait"], "0|10|0010");
}

#[test]
fn verify_suites_pass() {
    let out = grigorchuk(&["verify", "relations"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.matches("[PASS]").count(), 17);
    assert!(!text.contains("[FAIL]"));

    let out = grigorchuk(&["verify", "cancellation", "--radius", "12", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn growth_writes_series_and_uses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let csv = dir.path().join("g.csv");
    let args = [
        "growth",
        "--radius",
        "6",
        "--out",
        csv.to_str().unwrap(),
        "--cache-dir",
        cache.to_str().unwrap(),
    ];
    let out = grigorchuk(&args);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("108"));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains("n,gamma,sphere"));
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);

    let again = grigorchuk(&args);
    assert_eq!(stdout(&again).lines().nth(7), stdout(&out).lines().nth(7));
}

#[test]
fn exhausted_budget_exits_with_3() {
    let out = grigorchuk(&["growth", "--radius", "14", "--budget-secs", "0.000001"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("PARTIAL"));
}

#[test]
fn exports() {
    let dir = tempfile::tempdir().unwrap();
    let cosets = dir.path().join("cosets.json");
    let out = grigorchuk(&[
        "export",
        "cosets",
        "--level",
        "2",
        "--out",
        cosets.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cosets).unwrap()).unwrap();
    assert_eq!(v["level"], 2);
    assert_eq!(v["index"], 8);
    assert_eq!(v["representatives"].as_array().unwrap().len(), 8);

    let series = dir.path().join("series.json");
    let out = grigorchuk(&[
        "export",
        "series",
        "--radius",
        "5",
        "--out",
        series.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(Path::new(&series).exists());
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let out = grigorchuk(&[
        "bench",
        "--max-len",
        "1024",
        "--reps",
        "1",
        "--out",
        csv.to_str().unwrap(),
    ]);
    // the verdict on such short words is noise; only the plumbing is checked
    assert!(matches!(out.status.code(), Some(0 | 1)));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# seed="));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 8);
}
