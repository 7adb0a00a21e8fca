use std::path::PathBuf;
use std::process::Command;

use kato_cli::{input_echo, parse_spec, parse_spec_str, run_file, Options, Status};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn kato(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kato"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

#[test]
fn exit_codes() {
    let cases = [
        ("triangle.json", 0),
        ("borel.json", 0),
        ("genus.json", 0),
        ("d15_good.json", 0),
        ("d15_corrupt.json", 1),
        ("malformed.json", 2),
        ("inadmissible.json", 2),
        ("missing.json", 2),
    ];
    for (name, code) in cases {
        let path = fixture(name);
        assert_eq!(kato(&[path.to_str().unwrap()]).0, code, "{name}");
    }
}

#[test]
fn strict_turns_warnings_into_failures() {
    let path = fixture("genus.json");
    assert_eq!(kato(&[path.to_str().unwrap(), "--strict"]).0, 1);
    let path = fixture("triangle.json");
    assert_eq!(kato(&[path.to_str().unwrap(), "--strict"]).0, 0);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for name in [
        "triangle.json",
        "borel.json",
        "genus.json",
        "d15_corrupt.json",
    ] {
        let path = fixture(name);
        let args = [path.to_str().unwrap(), "--dot", "--contract"];
        assert_eq!(kato(&args), kato(&args), "{name}");
    }
    assert_eq!(
        kato(&["--fuzz", "50", "--seed", "3"]),
        kato(&["--fuzz", "50", "--seed", "3"])
    );
}

#[test]
fn out_dir_holds_report_and_diagrams() {
    let dir = tempfile::tempdir().unwrap();
    let path = fixture("triangle.json");
    let (code, stdout) = kato(&[
        path.to_str().unwrap(),
        "--dot",
        "--contract",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("cusps: direct 3 = general 3 = char0 3"));
    let dot = std::fs::read_to_string(dir.path().join("graph.dot")).unwrap();
    assert!(dot.starts_with("digraph kato {"));
    assert!(dir.path().join("skeleton.dot").exists());
}

#[test]
fn echo_round_trips() {
    for name in ["triangle.json", "borel.json", "genus.json", "d15_good.json"] {
        let path = fixture(name);
        let spec = parse_spec(&path).unwrap();
        let out = run_file(&path, &Options::default());
        let echoed = parse_spec_str(input_echo(&out.report).unwrap(), "echo").unwrap();
        assert_eq!(echoed, spec, "{name}");
    }
}

#[test]
fn parse_errors_carry_positions() {
    let out = run_file(&fixture("malformed.json"), &Options::default());
    assert_eq!(out.status, Status::Invalid);
    assert!(out.report.contains("line 5 column 3"), "{}", out.report);
}

#[test]
fn unknown_fields_are_rejected() {
    let text = r#"{"field": {"char_K": 0, "p": 5, "m": 1}, "vertices": [], "colour": 1}"#;
    assert!(parse_spec_str(text, "x").is_err());
}

#[test]
fn corrupted_extension_reports_the_mismatch() {
    let out = run_file(&fixture("d15_corrupt.json"), &Options::default());
    assert_eq!(out.status, Status::Failure);
    assert!(
        out.report.contains("cusps: direct 4 != general 3"),
        "{}",
        out.report
    );
}

#[test]
fn fuzz_mode_agrees() {
    let (code, stdout) = kato(&["--fuzz", "200", "--seed", "11"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("200 of 200 inputs agree"));
}

#[test]
fn no_arguments_is_a_usage_error() {
    assert_eq!(kato(&[]).0, 2);
}
