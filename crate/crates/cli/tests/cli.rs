use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::io::Write;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn cinfty(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cinfty")).args(args).output().expect("binary runs")
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cinfty"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Compares with the frozen file; `UPDATE_GOLDEN=1` rewrites it instead.
fn assert_golden(actual: &str, file: &str) {
    let path = golden(file);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

#[test]
fn acceptance_script_matches_golden() {
    let script = root().join("scripts/acceptance.cinf");
    let o = cinfty(&["run", script.to_str().unwrap(), "--format", "structured", "--omit-timing"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_golden(&stdout(&o), "acceptance.jsonl");
}

#[test]
fn empty_script_prints_nothing() {
    let o = cinfty(&["run", golden("empty.cinf").to_str().unwrap(), "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    assert_golden(&stdout(&o), "empty.out");
    assert!(stdout(&o).is_empty());
}

#[test]
fn comment_only_script_prints_nothing() {
    let o = cinfty(&["run", golden("comments.cinf").to_str().unwrap(), "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    assert_golden(&stdout(&o), "comments.out");
    assert!(stdout(&o).is_empty());
}

#[test]
fn radical_member_of_generator_is_proved() {
    let o = with_stdin(&["run", "-"], "ring R vars=1 relations=[x0*(x0-1)]\nradical-member f=x0*(x0-1)\n");
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("2: radical-member PROVED")), "{out}");
}

#[test]
fn nullstellensatz_on_trivial_ring() {
    let o = with_stdin(&["run", "-"], "ring R vars=1 relations=[x0^2+1]\nnullstellensatz\n");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("nullstellensatz PROVED (ring trivial)"));
}

#[test]
fn malformed_term_exits_64_with_position() {
    let o = with_stdin(&["run", "-"], "ring R vars=1 relations=[x0+*2]\n");
    assert_eq!(o.status.code(), Some(64));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 1, column 29"), "{err}");
}

#[test]
fn semantic_errors_exit_64_and_stop() {
    let o = with_stdin(&["run", "-"], "radical-member ring=Nope f=x0\nring R vars=1\n");
    assert_eq!(o.status.code(), Some(64));
    assert!(stdout(&o).is_empty());
    assert!(String::from_utf8(o.stderr).unwrap().contains("unknown name `Nope`"));

    let o = with_stdin(&["run", "-"], "ring R vars=1\nradical-member f=x3\n");
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8(o.stderr).unwrap().contains("exceeds arity"));

    let o = with_stdin(&["run", "-"], "ring R vars=1\nring R vars=2\n");
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn structured_errors_are_records() {
    let o = with_stdin(&["run", "-", "--format", "structured"], "ring R vars=1 relations=[x0+]\n");
    assert_eq!(o.status.code(), Some(64));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["error"]["line"], 1);
}

#[test]
fn failed_expectation_exits_1() {
    let o = with_stdin(&["run", "-"], "ring R vars=1 relations=[x0]\nradical-member f=x0-1 expect PROVED\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("expect PROVED: NOT MET"));
}

#[test]
fn unknown_is_an_error_only_when_strict() {
    let script = "ring F vars=1 relations=[sin(x0)-x0]\nradical-member f=x0\n";
    let budget = ["--depth", "6", "--max-boxes", "50"];
    let lax = with_stdin(&[&["run", "-"][..], &budget].concat(), script);
    assert_eq!(lax.status.code(), Some(0));
    assert!(stdout(&lax).contains("UNKNOWN"));
    let strict = with_stdin(&[&["run", "-", "--strict"][..], &budget].concat(), script);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn bad_flags_exit_64() {
    assert_eq!(cinfty(&["run", "-", "--bogus"]).status.code(), Some(64));
    assert_eq!(with_stdin(&["run", "-", "--box", "1,0"], "").status.code(), Some(64));
    assert_eq!(with_stdin(&["run", "-", "--min-width", "abc"], "").status.code(), Some(64));
    assert_eq!(cinfty(&["--help"]).status.code(), Some(0));
}

#[test]
fn box_flag_sets_the_default_region() {
    let o = with_stdin(&["run", "-", "--box", "0,1/2"], "ring R vars=1 relations=[x0-1]\nnullstellensatz\n");
    assert!(stdout(&o).contains("box=0,1/2"));
    assert!(stdout(&o).contains("nullstellensatz PROVED"));
}

#[test]
fn certificates_revalidate() {
    let script = root().join("scripts/acceptance.cinf");
    let o = cinfty(&["run", script.to_str().unwrap(), "--format", "structured", "--certificates"]);
    assert_eq!(o.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.jsonl");
    std::fs::write(&path, stdout(&o)).unwrap();
    let c = cinfty(&["check", path.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0), "{}", stdout(&c));
    assert!(stdout(&c).contains(" valid, 0 invalid"));

    // A tampered witness is caught.
    let records = stdout(&o);
    let at = records.find("\"trace\":{\"verdict\":\"REFUTED\"").expect("a refutation trace");
    let (head, tail) = records.split_at(at);
    let tampered = format!("{head}{}", tail.replacen("\"kind\":\"exact\",\"value\":\"", "\"kind\":\"exact\",\"value\":\"3/7", 1));
    std::fs::write(&path, tampered).unwrap();
    assert_eq!(cinfty(&["check", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn thread_count_does_not_change_output() {
    let script = root().join("scripts/acceptance.cinf");
    let run = |t: &str| {
        stdout(&cinfty(&["run", script.to_str().unwrap(), "--format", "structured", "--omit-timing", "--threads", t]))
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("8"));
}

#[test]
fn points_are_exported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("points.txt");
    let script = format!("ring R vars=1 relations=[x0^2-x0]\npoints export={}\n", path.display());
    let o = with_stdin(&["run", "-"], &script);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "0\n1\n");
}

#[test]
fn timing_is_reported_unless_omitted() {
    let o = with_stdin(&["run", "-", "--format", "structured"], "ring R vars=1\n");
    assert!(stdout(&o).contains("\"timing_ms\""));
    let o = with_stdin(&["run", "-", "--format", "structured", "--omit-timing"], "ring R vars=1\n");
    assert!(!stdout(&o).contains("timing"));
}
