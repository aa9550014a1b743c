use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use chen_reciprocity::harness::{parse_report, Status};

fn chenrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chenrec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn docs(name: &str) -> String {
    let p: PathBuf = [
        env!("CARGO_MANIFEST_DIR"),
        "..",
        "..",
        "docs",
        "examples",
        name,
    ]
    .iter()
    .collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn verify_passes_on_the_shipped_scenes() {
    for scene in ["worked.json", "three_forms.json", "torus.json"] {
        let out = chenrec(&["verify", "--scene", &docs(scene)]);
        let text = String::from_utf8_lossy(&out.stdout);
        assert_eq!(out.status.code(), Some(0), "{scene}: {text}");
        assert!(text.contains("overall PASS"));
    }
}

#[test]
fn json_report_lists_each_requested_check_once() {
    let out = chenrec(&[
        "verify",
        "--scene",
        &docs("worked.json"),
        "--checks",
        "weil,residue,weil",
        "--report",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = parse_report(&String::from_utf8_lossy(&out.stdout)).unwrap();
    let names: Vec<&str> = report.checks.iter().map(|c| c.check.name()).collect();
    assert_eq!(names, ["weil", "residue"]);
    assert!(report.checks.iter().all(|c| c.status == Status::Pass));
}

#[test]
fn forced_failure_exits_with_one() {
    let out = chenrec(&[
        "verify",
        "--scene",
        &docs("worked.json"),
        "--checks",
        "global",
        "--tol",
        "1e-15",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn input_errors_exit_with_two() {
    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(
        bad,
        r#"{{"surface": {{"genus": 1, "tau": [0, -1]}}, "forms": [], "basepoint": [0, 0]}}"#
    )
    .unwrap();
    let out = chenrec(&["verify", "--scene", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("surface.tau"));
    let out = chenrec(&[
        "verify",
        "--scene",
        &docs("worked.json"),
        "--checks",
        "residue,nope",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = chenrec(&["verify", "--scene", "/nonexistent/scene.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_check_list_is_an_empty_report() {
    let mut scene = tempfile::NamedTempFile::new().unwrap();
    write!(
        scene,
        r#"{{"surface": {{"genus": 0}}, "forms": [{{"type": "rational", "num": [1], "den": [0, 1]}}], "basepoint": [1, 1]}}"#
    )
    .unwrap();
    let out = chenrec(&[
        "verify",
        "--scene",
        scene.path().to_str().unwrap(),
        "--report",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = parse_report(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert!(report.checks.is_empty() && report.passed);
}

#[test]
fn lvalue_command() {
    let out = chenrec(&["lvalue", "--qexp", &docs("delta.qexp"), "--n", "1"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("relative_diff"));
    let mut short = tempfile::NamedTempFile::new().unwrap();
    writeln!(short, "weight 12 cutoff 2\n1 1\n2 -24").unwrap();
    let out = chenrec(&[
        "lvalue",
        "--qexp",
        short.path().to_str().unwrap(),
        "--n",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tame_symbol_command() {
    let out = chenrec(&[
        "tame-symbol",
        "--scene",
        &docs("worked.json"),
        "--pole",
        "0",
        "--degree",
        "2",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.starts_with("pole 0 at"));
    assert_eq!(text.lines().filter(|l| l.starts_with('A')).count(), 6);
    let out = chenrec(&[
        "tame-symbol",
        "--scene",
        &docs("worked.json"),
        "--pole",
        "99",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
