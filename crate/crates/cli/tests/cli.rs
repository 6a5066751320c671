use std::fs;
use std::io::Write;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

fn eulercong(cache: &TempDir, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulercong"))
        .args(args)
        .env("EULERCONG_CACHE_DIR", cache.path())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn first_example_exits_zero_with_local_value_table() {
    let cache = TempDir::new().unwrap();
    let o = eulercong(&cache, &["analyze-pair", "66a1", "462d1", "--p", "5", "--field", "Q"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("Σ₀ = {2, 3, 7, 11}"), "{text}");
    assert!(text.contains("∏c_v = 16"));
    assert!(text.contains("outcome: Consistent (exit 0)"));
}

#[test]
fn second_example_over_qi_uses_divisibility() {
    let cache = TempDir::new().unwrap();
    let o = eulercong(&cache, &["analyze-pair", "38a1", "114b1", "--p", "5", "--field", "Qi", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdicts"]["congruence"]["clause"], "divisibility");
    assert_eq!(v["outcome"], "consistent");
}

#[test]
fn not_congruent_pair_exits_three() {
    let cache = TempDir::new().unwrap();
    let db = cache.path().join("curves.txt");
    fs::write(
        &db,
        "label=11a1 a1=0 a2=-1 a3=1 a4=-10 a6=-20 rank=0\nlabel=19a1 a1=0 a2=1 a3=1 a4=-9 a6=-15 rank=0\n",
    )
    .unwrap();
    let o = eulercong(&cache, &["analyze-pair", "11a1", "19a1", "--p", "7", "--db", db.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("NOT 7-congruent, witness ℓ = 2"));
}

#[test]
fn errors_and_usage_exit_one() {
    let cache = TempDir::new().unwrap();
    let o = eulercong(&cache, &["analyze-pair", "66a1", "462d1", "--p", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p must be odd"));
    assert_eq!(eulercong(&cache, &["analyze-pair", "66a1", "nope", "--p", "5"]).status.code(), Some(1));
    assert_eq!(eulercong(&cache, &["frobnicate"]).status.code(), Some(1));
}

#[test]
fn local_data_reports_split_place_of_norm_361() {
    let cache = TempDir::new().unwrap();
    let o = eulercong(&cache, &["local-data", "38a1", "--prime", "19", "--field", "Qi", "--p", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o).lines().find(|l| l.starts_with("38a1")).unwrap().to_string();
    let cols: Vec<_> = line.split_whitespace().collect();
    assert_eq!(cols, ["38a1", "19", "361", "split", "I1", "1", "1", "1", "1", "360/361", "5"]);
}

#[test]
fn saved_json_report_renders_identically() {
    let cache = TempDir::new().unwrap();
    let json = cache.path().join("r.json");
    let args = ["analyze-pair", "66a1", "462d1", "--p", "5"];
    let o = eulercong(&cache, &[&args[..], &["--format", "json", "--out", json.to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let direct = stdout(&eulercong(&cache, &args));
    let from_file = eulercong(&cache, &["report", "--format", "text", json.to_str().unwrap()]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(stdout(&from_file), direct);

    let mut child = Command::new(env!("CARGO_BIN_EXE_eulercong"))
        .args(["report", "--format", "json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&fs::read(&json).unwrap()).unwrap();
    let piped = child.wait_with_output().unwrap();
    assert_eq!(piped.stdout, fs::read(&json).unwrap());
}

#[test]
fn cache_is_written_and_warm_runs_agree() {
    let cache = TempDir::new().unwrap();
    let args = ["analyze-pair", "66a1", "462d1", "--p", "5", "--format", "json"];
    let cold = stdout(&eulercong(&cache, &args));
    assert!(fs::read_dir(cache.path()).unwrap().count() > 0);
    let warm = stdout(&eulercong(&cache, &args));
    assert_eq!(cold, warm);
    let uncached = stdout(&eulercong(&cache, &[&["--no-cache"][..], &args].concat()));
    assert_eq!(cold, uncached);
}

#[test]
fn scan_lists_both_example_pairs() {
    let cache = TempDir::new().unwrap();
    let db = cache.path().join("db.txt");
    fs::write(&db, include_str!("../../core/data/curves.txt")).unwrap();
    let o = eulercong(&cache, &["scan", db.to_str().unwrap(), "--p", "5", "--bound", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("66a1 462d1")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("38a1 114b1")), "{text}");
    assert_eq!(eulercong(&cache, &["scan", db.to_str().unwrap(), "--p", "2"]).status.code(), Some(1));
}
