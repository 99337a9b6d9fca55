use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn yflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yflow"))
        .args(args)
        .env_remove("YFLOW_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const SMALL: &str = r#"{
    "name": "small",
    "m": 3,
    "grid": {"r_max": 4.0, "n": 80},
    "time": {"T": 0.1, "dt": 0.005},
    "initial": {"kind": "constant", "value": 1.0},
    "checks": [{"id": "rigidity"}, {"id": "lemma1"}]
}"#;

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn constants_for_three_dimensions() {
    let out = yflow(&["constants", "--m", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("eta=0.25"));
    assert!(text.contains("m(m-1)=6"));
    for key in ["lambda=", "C_m=", "c_m="] {
        assert!(text.contains(key), "{text}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(yflow(&["run"]).status.code(), Some(2));
    assert_eq!(yflow(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        yflow(&["verify", "--suite", "lemma2"]).status.code(),
        Some(2)
    );
    assert_eq!(yflow(&["constants", "--m", "2"]).status.code(), Some(2));
    assert_eq!(
        yflow(&["verify", "--suite", "lemma3", "--bogus"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn invalid_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("\"m\": 3", "\"m\": 2"));
    let out = yflow(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m:"));
}

#[test]
fn verify_rigidity_passes() {
    let out = yflow(&["verify", "--suite", "rigidity"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS rigidity.scaling"));
}

#[test]
fn quiet_suppresses_check_lines() {
    let out = yflow(&["--quiet", "verify", "--suite", "lemma3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(!text.contains("PASS"));
    assert_eq!(text.lines().count(), 1);
}

#[test]
fn run_writes_deterministic_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for target in [&a, &b] {
        let out = yflow(&["run", "--config", &cfg, "--out", target.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stdout(&out));
    }
    for file in ["small.csv", "small.report.json"] {
        assert_eq!(
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap()
        );
    }
    let csv = fs::read_to_string(a.join("small.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,r,u,U,R"));
    assert_eq!(csv.lines().count(), 1 + 11 * 81);
}

#[test]
fn out_dir_defaults_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let target = dir.path().join("from_env");
    let out = Command::new(env!("CARGO_BIN_EXE_yflow"))
        .args(["run", "--config", &cfg])
        .env("YFLOW_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("small.report.json").exists());
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace(
        r#""kind": "constant", "value": 1.0"#,
        r#""kind": "euclidean""#,
    );
    let cfg = write_config(dir.path(), &text);
    let out = yflow(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL rigidity"));
    let report = fs::read_to_string(dir.path().join("small.report.json")).unwrap();
    assert!(report.contains("\"status\": \"fail\""));
}

#[test]
fn missing_config_file_fails() {
    let out = yflow(&[
        "run",
        "--config",
        "/nonexistent/config.json",
        "--out",
        "/tmp",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
