use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(rel)
}

fn corpus_path() -> String {
    data("basic_emotions.json").to_str().unwrap().to_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_puppetwire"))
        .args(args)
        .env("PUPPETWIRE_LOG", "error")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn validate_bundled_corpus() {
    let o = run(&["validate", &corpus_path()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "OK: 6 commands");
}

#[test]
fn validate_reports_component_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"commands": [{"key": "q", "semantic": "odd", "valence": 5, "arousal": 70,
        "tree": {"root": "r", "nodes": [
            {"id": "r", "kind": "root+", "children": ["b"]},
            {"id": "b", "kind": "sequence+", "params": {"component": "background"}, "children": ["s"]},
            {"id": "s", "kind": "sound", "params": {"sound_id": "laugh"}}]}}]}"#,
    )
    .unwrap();
    let o = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("COMPONENT_MISMATCH"), "{}", stderr(&o));
}

#[test]
fn validate_malformed_and_missing() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("trunc.json");
    std::fs::write(&bad, r#"{"commands": ["#).unwrap();
    let o = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("MALFORMED_DOCUMENT"), "{}", stderr(&o));

    let o = run(&["validate", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn render_swap_only_command() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.json");
    std::fs::write(
        &corpus,
        r#"{"commands": [{"key": "j", "semantic": "joy", "valence": 8, "arousal": 75,
        "tree": {"root": "r", "nodes": [
            {"id": "r", "kind": "root+", "children": ["f"]},
            {"id": "f", "kind": "sequence+", "params": {"component": "face"}, "children": ["w"]},
            {"id": "w", "kind": "swap", "params": {"template": "happy"}}]}}]}"#,
    )
    .unwrap();
    let out = dir.path().join("frames.ndjson");
    let args = [
        "render",
        corpus.to_str().unwrap(),
        "--key",
        "j",
        "--fps",
        "30",
        "--out",
        out.to_str().unwrap(),
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let frames = lines(&out);
    assert_eq!(frames.len(), 60);
    assert_eq!(frames[0]["puppet"]["expression"], "happy");
    assert_eq!(frames[58]["puppet"]["expression"], "happy");
    assert_eq!(frames[59]["puppet"]["expression"], "neutral");
    let first = std::fs::read(&out).unwrap();
    run(&args);
    assert_eq!(std::fs::read(&out).unwrap(), first);
}

#[test]
fn render_seed_changes_particles() {
    let dir = tempfile::tempdir().unwrap();
    let out = |s: &str| dir.path().join(format!("h{s}.ndjson"));
    for seed in ["1", "2"] {
        let o = run(&[
            "render",
            &corpus_path(),
            "--key",
            "h",
            "--seed",
            seed,
            "--out",
            out(seed).to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_ne!(std::fs::read(out("1")).unwrap(), std::fs::read(out("2")).unwrap());
}

#[test]
fn render_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.ndjson");
    let o = run(&["render", &corpus_path(), "--key", "z", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("UNKNOWN_KEY"));
    assert!(!out.exists());

    let o = run(&[
        "render",
        &corpus_path(),
        "--key",
        "h",
        "--fps",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&[
        "render",
        &corpus_path(),
        "--key",
        "h",
        "--out",
        dir.path().join("no/such/dir.ndjson").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_recommend_matches() {
    let o = run(&[
        "oracle",
        "recommend",
        &corpus_path(),
        "--valence",
        "8",
        "--arousal",
        "75",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.trim_end().ends_with("MATCH"), "{text}");
    assert!(!text.contains("fallback"));
    // happy sits exactly on the query
    assert!(text.contains("recommend:\n  1. h d=0.000000"), "{text}");
}

#[test]
fn oracle_recommend_flags_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("neg.json");
    std::fs::write(&corpus, r#"{"commands": [
        {"key": "a", "semantic": "sad", "valence": 2, "arousal": 55, "tree": {"root": "r", "nodes": [{"id": "r", "kind": "root+"}]}},
        {"key": "b", "semantic": "angry", "valence": 3, "arousal": 85, "tree": {"root": "r", "nodes": [{"id": "r", "kind": "root+"}]}}]}"#).unwrap();
    let o = run(&[
        "oracle",
        "recommend",
        corpus.to_str().unwrap(),
        "--valence",
        "8",
        "--arousal",
        "60",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("fallback"));
}

#[test]
fn oracle_recommend_rejects_bad_query() {
    let o = run(&[
        "oracle",
        "recommend",
        &corpus_path(),
        "--valence",
        "0",
        "--arousal",
        "70",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&[
        "oracle",
        "recommend",
        &corpus_path(),
        "--valence",
        "-3",
        "--arousal",
        "70",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

fn simulate(scenario: &Path, dir: &Path) -> (Output, PathBuf) {
    let out = dir.join("frames.ndjson");
    (
        run(&["simulate", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()]),
        out,
    )
}

#[test]
fn simulate_bpm_ramp() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = simulate(&data("scenarios/bpm_ramp.ndjson"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["final_arousal"], 90);
    let on_disk: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("frames.ndjson.summary.json")).unwrap()).unwrap();
    assert_eq!(on_disk, summary);
    assert_eq!(lines(&out).len() as u64, summary["frames"].as_u64().unwrap());
}

#[test]
fn simulate_still_face() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = simulate(&data("scenarios/still_face.ndjson"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s: Value = serde_json::from_slice(&o.stdout).unwrap();
    let (x, y) = (s["final_x"].as_f64().unwrap(), s["final_y"].as_f64().unwrap());
    assert!((x - 0.5).hypot(y - 0.5) < 0.02, "({x}, {y})");
}

#[test]
fn simulate_empty_is_idle() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = simulate(&data("scenarios/empty.ndjson"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let frames = lines(&out);
    assert_eq!(frames.len(), 60);
    assert!(frames.iter().all(|f| f["puppet"]["expression"] == "neutral"));
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, out) = simulate(&data("scenarios/performance.ndjson"), dir.path());
    let first = std::fs::read(&out).unwrap();
    let (b, _) = simulate(&data("scenarios/performance.ndjson"), dir.path());
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&out).unwrap(), first);
}

#[test]
fn simulate_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ndjson");
    std::fs::write(&bad, "{\"t_ms\": 5, \"kind\": \"trigger\", \"key\": \"a\"}\nnot json\n").unwrap();
    let (o, _) = simulate(&bad, dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    let (o, _) = simulate(&dir.path().join("missing.ndjson"), dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["render"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
