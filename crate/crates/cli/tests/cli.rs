use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn stabcov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabcov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = stabcov(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn data_rows(report: &str) -> Vec<Vec<String>> {
    report
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("t,"))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn gen_random_is_reproducible() {
    let a = ok(&["gen", "random", "--n", "50", "--bbox", "100", "--seed", "7"]);
    let b = ok(&["gen", "random", "--n", "50", "--bbox", "100", "--seed", "7"]);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 50);
    assert!(a.lines().all(|l| l.starts_with("op=insert ")));
    let c = ok(&["gen", "random", "--n", "50", "--seed", "8"]);
    assert_ne!(a, c);
}

#[test]
fn gen_lower_bound_has_2m_plus_one_events() {
    let s = ok(&["gen", "lower-bound", "--m", "3"]);
    assert_eq!(s.lines().count(), 7);
    let s = ok(&["gen", "lower-bound", "--m", "3", "--trigger", "far"]);
    assert_eq!(s.lines().last().unwrap(), "op=insert x=0 y=6.25");
}

#[test]
fn gen_lines_emits_all_steps() {
    let s = ok(&["gen", "lines", "--m", "6", "--seed", "1"]);
    let steps: std::collections::BTreeSet<&str> = s
        .lines()
        .filter(|l| l.starts_with("op=line"))
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(steps.len(), 8);
    assert_eq!(s.lines().filter(|l| l.starts_with("op=line")).count(), 24);
    assert!(stabcov(&["gen", "lines", "--m", "7"]).status.code() == Some(2));
}

#[test]
fn gen_expander_edge_list() {
    let s = ok(&["gen", "expander", "--n", "30", "--seed", "2"]);
    assert_eq!(s.lines().count(), 90);
    for l in s.lines() {
        let uv: Vec<usize> = l.split_whitespace().map(|x| x.parse().unwrap()).collect();
        assert_eq!(uv.len(), 2);
        assert!(uv[0] < 30 && (30..60).contains(&uv[1]));
    }
}

#[test]
fn two_stable_rows_respect_guarantees() {
    let dir = TempDir::new().unwrap();
    let stream = path(&dir, "s.txt");
    ok(&["gen", "random", "--n", "100", "--bbox", "20", "--clusters", "3", "--seed", "4", "--out", &stream]);
    let report = ok(&["run", "--engine", "two_stable", "--m", "3", &stream]);
    let rows = data_rows(&report);
    assert_eq!(rows.len(), 100);
    for r in rows {
        let churn: usize = r[5].parse().unwrap();
        let ratio: f64 = r[4].parse().unwrap();
        assert!(churn <= 2 && ratio >= 0.5, "{r:?}");
    }
    assert!(report.lines().last().unwrap().starts_with("# max_churn="));
}

#[test]
fn sas_small_stream_uses_trivial_branches() {
    let dir = TempDir::new().unwrap();
    let stream = path(&dir, "s.txt");
    fs::write(&stream, "op=insert x=0 y=0\nop=insert x=0.5 y=0\nop=insert x=10 y=10\n").unwrap();
    let report = ok(&["run", "--engine", "sas", "--m", "2", "--epsilon", "0.25", &stream]);
    for r in data_rows(&report) {
        assert!(r[6] == "TrivialSwapAll" || r[6] == "NoChange", "{r:?}");
    }
}

#[test]
fn exact_maintainer_on_lower_bound_stream() {
    // Records the trigger row; see the acceptance suite for the churn check.
    let dir = TempDir::new().unwrap();
    let stream = path(&dir, "lb.txt");
    ok(&["gen", "lower-bound", "--m", "4", "--out", &stream]);
    let report = ok(&["run", "--engine", "exact_maintainer", "--m", "4", &stream]);
    let rows = data_rows(&report);
    assert_eq!(rows.len(), 9);
    let last = rows.last().unwrap();
    assert_eq!(last[2], last[3]);
    assert_eq!(last[3], "9");
}

#[test]
fn run_then_verify_roundtrip_and_tamper() {
    let dir = TempDir::new().unwrap();
    let stream = path(&dir, "s.txt");
    let report = path(&dir, "r.csv");
    ok(&["gen", "random", "--n", "60", "--bbox", "15", "--delete-prob", "0.2", "--seed", "3", "--out", &stream]);
    ok(&["run", "--engine", "sas", "--m", "3", "--seed", "5", "--out", &report, &stream]);
    let v = ok(&["verify", "--report", &report, &stream]);
    assert!(v.starts_with("ok: 60 rows"), "{v}");

    let text = fs::read_to_string(&report).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut fields: Vec<String> = lines[2].split(',').map(str::to_string).collect();
    fields[5] = "99".into();
    lines[2] = fields.join(",");
    let tampered = path(&dir, "bad.csv");
    fs::write(&tampered, lines.join("\n") + "\n").unwrap();
    let out = stabcov(&["verify", "--report", &tampered, &stream]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("mismatch"));
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let stream = path(&dir, "s.txt");
    ok(&["gen", "random", "--n", "80", "--bbox", "30", "--clusters", "2", "--seed", "11", "--out", &stream]);
    let args = ["run", "--engine", "sas", "--m", "4", "--seed", "9", "--scaled", "c_star=1,trivial_threshold=0", &stream];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a, b);
    assert!(a.starts_with("# engine=sas m=4 epsilon=0.25 solver=exact seed=9 scaled=c_star=1,trivial_threshold=0\n"));
}

#[test]
fn malformed_stream_reports_line_number() {
    let dir = TempDir::new().unwrap();
    let stream = path(&dir, "s.txt");
    fs::write(&stream, "op=insert x=1 y=1\n# note\nop=insert x=2\n").unwrap();
    let out = stabcov(&["run", "--m", "2", &stream]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn bad_config_and_missing_files_fail() {
    let dir = TempDir::new().unwrap();
    let stream = path(&dir, "s.txt");
    fs::write(&stream, "op=insert x=1 y=1\n").unwrap();
    assert_eq!(stabcov(&["run", "--m", "2", "--epsilon", "0.5", &stream]).status.code(), Some(2));
    assert_eq!(stabcov(&["run", "--m", "0", &stream]).status.code(), Some(2));
    assert_eq!(stabcov(&["run", "--m", "2", "--scaled", "nope=1", &stream]).status.code(), Some(2));
    let missing = dir.path().join("absent.txt");
    assert!(!Path::new(&missing).exists());
    assert_eq!(stabcov(&["run", "--m", "2", missing.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&stream, "op=delete x=1 y=1\n").unwrap();
    assert_eq!(stabcov(&["run", "--m", "2", &stream]).status.code(), Some(2));
}
