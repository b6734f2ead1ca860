use std::path::Path;
use std::process::{Command, Output};

use help_core::chartab::bundled;

fn help(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_help")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_settles_s3() {
    let o = help(&["check", "--table", "S3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("zc1: proved"), "{text}");
    assert!(text.contains("order 6: 0 survivors"));
}

#[test]
fn check_leaves_s6_open_at_involutions() {
    let o = help(&["check", "--table", "S6", "--orders", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("2a:-1 2b:1 2c:1"), "{text}");
    assert!(text.contains("zc1: open; survivors or capped at 2"));
}

#[test]
fn json_reports_are_deterministic_and_revalidate() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |out: &Path, jobs: &str| {
        help(&["--jobs", jobs, "check", "--table", "S5", "--format", "json", "--out", path(out)])
    };
    assert_eq!(code(&args(&a, "1")), 0);
    assert_eq!(code(&args(&b, "4")), 0);
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!ta.is_empty());
    assert_eq!(ta, tb);
    let v = help(&["validate", "--report", path(&a), "--table", "S5"]);
    assert_eq!(code(&v), 0, "{}", stderr(&v));
    let wrong = help(&["validate", "--report", path(&a), "--table", "S6"]);
    assert_eq!(code(&wrong), 2);
}

#[test]
fn capped_runs_exit_3_with_a_report() {
    let o = help(&["check", "--table", "S6", "--orders", "2", "--cap", "1", "--format", "json"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stdout(&o).contains("\"complete\": false"));
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.fusion.json");
    for args in [
        vec!["check", "--table", "S3", "--fusion", path(&missing)],
        vec!["check", "--table", "S4", "--fusion", "S4_to_S3"],
        vec!["check", "--table", "S4", "--p-part", "2"],
        vec!["check", "--table", "S3", "--orders", "4"],
        vec!["check", "--table", "NoSuchGroup"],
        vec!["check", "--table", "S3", "--brauer", "5"],
        vec!["check", "--table", "S3", "--brauer", "x"],
    ] {
        let o = help(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn quotient_runs() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("s3.json");
    assert_eq!(code(&help(&["check", "--table", "S3", "--format", "json", "--out", path(&q)])), 0);
    let plain = help(&["check", "--table", "S4", "--format", "json"]);
    let with = help(&["check", "--table", "S4", "--fusion", "S4_to_S3", "--quotient-report", path(&q), "--format", "json"]);
    assert_eq!(code(&with), 0, "{}", stderr(&with));
    let count = |o: &Output| stdout(o).matches("\"trivial\"").count();
    assert!(count(&with) <= count(&plain));
    let p = help(&[
        "check", "--table", "S4", "--fusion", "S4_to_S3", "--quotient-report", path(&q), "--p-part", "2",
    ]);
    assert_eq!(code(&p), 0, "{}", stderr(&p));
    let wrong_p = help(&[
        "check", "--table", "S4", "--fusion", "S4_to_S3", "--quotient-report", path(&q), "--p-part", "3",
    ]);
    assert_eq!(code(&wrong_p), 2);
}

#[test]
fn eigenvalues_of_a_group_element() {
    let o = help(&["eigenvalues", "--table", "S6", "--order", "2", "--tuple", "1,0,0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = bundled::table("S6").unwrap();
    let c = t.class_index("2a").unwrap();
    let lines: Vec<String> = stdout(&o).lines().skip(1).map(str::to_string).collect();
    assert_eq!(lines.len(), t.characters.len());
    for (line, chi) in lines.iter().zip(&t.characters) {
        let v = chi.values[c].to_rational().unwrap().to_integer();
        let minus = (i64::try_from(chi.degree).unwrap() - i64::try_from(v).unwrap()) / 2;
        assert!(line.starts_with(&chi.name));
        assert_eq!(line.matches("-1").count() as i64, minus, "{line}");
    }
}

#[test]
fn eigenvalues_accepts_named_classes_and_powers() {
    let o = help(&["eigenvalues", "--table", "PSL216", "--order", "6", "--tuple", "2a=4,3a=-3", "--power", "2:2a=1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("X16a diag(1,1,"));
}

#[test]
fn eigenvalues_rejects_bad_tuples() {
    let short = help(&["eigenvalues", "--table", "S6", "--order", "2", "--tuple", "1,0"]);
    assert_eq!(code(&short), 2);
    assert!(stderr(&short).contains("expected 3 values"));
    let not_survivor = help(&["eigenvalues", "--table", "S6", "--order", "2", "--tuple=3,-2,0"]);
    assert_eq!(code(&not_survivor), 2);
    assert!(stderr(&not_survivor).contains("not a survivor"));
    let forced = help(&["eigenvalues", "--table", "S6", "--order", "2", "--tuple=3,-2,0", "--force"]);
    assert_eq!(code(&forced), 0);
    assert!(stderr(&forced).contains("warning"));
    assert!(stdout(&forced).contains("not a survivor; multiplicities by l"));
}

#[test]
fn validate_corpus_and_broken_files() {
    assert_eq!(code(&help(&["validate"])), 0);
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("s3.json");
    std::fs::write(&good, bundled::document("S3").unwrap()).unwrap();
    assert_eq!(code(&help(&["validate", path(&good)])), 0);

    let mut doc: serde_json::Value = serde_json::from_str(bundled::document("S3").unwrap()).unwrap();
    doc["classes"][1]["size"] = 4.into();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let o = help(&["validate", path(&good), path(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("class 2a"), "{}", stderr(&o));

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "").unwrap();
    let o = help(&["validate", path(&empty)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("parse error"));
}

#[test]
fn table_files_work_like_bundled_names() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("a5.json");
    std::fs::write(&f, bundled::document("A5").unwrap()).unwrap();
    let a = help(&["check", "--table", path(&f), "--format", "json"]);
    let b = help(&["check", "--table", "A5", "--format", "json"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
}
