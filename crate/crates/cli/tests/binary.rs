//! End-to-end runs of the built binary: report determinism on disk, the
//! exit-code contract, and the file-format surfaces.

use std::fs;
use std::process::Command;

fn heatlog() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heatlog"))
}

fn write_fixture(dir: &std::path::Path) -> (String, String, String) {
    let kernel = dir.join("kernel.json");
    let u = dir.join("u.json");
    let v = dir.join("v.json");
    fs::write(
        &kernel,
        r#"{"size": 3, "entries": [[0, 1, "0.5"], [1, 2, "0.5"]]}"#,
    )
    .unwrap();
    fs::write(&u, r#"["1", "0", "0"]"#).unwrap();
    fs::write(&v, r#"["0", "0", "1"]"#).unwrap();
    (
        kernel.display().to_string(),
        u.display().to_string(),
        v.display().to_string(),
    )
}

#[test]
fn byte_identical_reports_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("run1.json");
    let out2 = dir.path().join("run2.json");
    for out in [&out1, &out2] {
        let status = heatlog()
            .args([
                "--seed",
                "42",
                "--threads",
                "2",
                "--out",
                out.to_str().unwrap(),
                "search",
                "--trials",
                "120",
                "--sizes",
                "3..6",
                "--t-max",
                "10",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read(&out1).unwrap();
    let b = fs::read(&out2).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "reports differ across identically-seeded runs");
}

#[test]
fn exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();
    let (kernel, u, v) = write_fixture(dir.path());

    // 0: all verdicts pass
    let ok = heatlog()
        .args(["moments", "--kernel", &kernel, "--u", &u, "--v", &v, "--t-max", "4"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));

    // 1: verdict failure (an impossible tolerance demands positive slack)
    let verdict = heatlog()
        .args([
            "--tol=-0.5",
            "check",
            "walks",
            "--lemma",
            "3.6",
            "--fixture",
            "complete4",
        ])
        .output()
        .unwrap();
    assert_eq!(verdict.status.code(), Some(1), "{verdict:?}");

    // 2: parse/usage errors
    let missing = heatlog()
        .args(["moments", "--kernel", "/nonexistent.json", "--u", &u, "--v", &v])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));

    let bad_vector = dir.path().join("bad.json");
    fs::write(&bad_vector, "[]").unwrap();
    let empty = heatlog()
        .args([
            "moments",
            "--kernel",
            &kernel,
            "--u",
            bad_vector.to_str().unwrap(),
            "--v",
            &v,
        ])
        .output()
        .unwrap();
    assert_eq!(empty.status.code(), Some(2));

    let usage = heatlog().args(["no-such-command"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn csv_surfaces() {
    let dir = tempfile::tempdir().unwrap();
    let (kernel, u, v) = write_fixture(dir.path());
    let moments = heatlog()
        .args([
            "--format", "csv", "moments", "--kernel", &kernel, "--u", &u, "--v", &v,
            "--t-max", "4",
        ])
        .output()
        .unwrap();
    let text = String::from_utf8(moments.stdout).unwrap();
    assert!(text.starts_with("t,m_t,log2_m_t\r\n"));
    assert!(text.contains("2,0.25,-2.0"));

    let continuous = heatlog()
        .args([
            "--format",
            "csv",
            "continuous",
            "--kernel",
            &kernel,
            "--u",
            &u,
            "--v",
            &v,
            "--grid-count",
            "4",
        ])
        .output()
        .unwrap();
    assert_eq!(continuous.status.code(), Some(0));
    let text = String::from_utf8(continuous.stdout).unwrap();
    assert!(text.starts_with("t,f,logf,residual\r\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn gadget_fixture_certifies() {
    let out = heatlog()
        .args(["gadget", "--fixture", "complete4", "--t", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdict"]["holds"], serde_json::Value::Bool(true));
    assert_eq!(report["verdict"]["gadget"]["branch_gate"], 2);
    assert_eq!(report["verdict"]["gadget"]["budget"]["end_to_end_ok"], true);
    // the report embeds the instance for replay
    assert!(report["kernel"]["entries"].is_array());
}
