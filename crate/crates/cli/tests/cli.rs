//! End-to-end checks of the binary contract: exit codes, the single-line
//! error channel, report files and worker-count determinism.

use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_supershift-lab"))
}

#[test]
fn passing_run_exits_zero_with_json_report() {
    let out = bin()
        .args([
            "superosc", "--a", "2", "--x", "-1:1:0.5", "--n", "10,20,40,80", "--eps", "zero",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tool"], "supershift-lab");
    assert_eq!(v["report"]["verdict"], true);
}

#[test]
fn failed_verdict_exits_one_but_still_reports() {
    // A constant perturbation never decays, so the ladder stalls.
    let out = bin()
        .args([
            "superosc", "--a", "2", "--x", "0:1:0.5", "--n", "10,20,40,80", "--eps", "list:0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["verdict"], false);
}

#[test]
fn usage_error_exits_two_with_single_error_line() {
    let out = bin()
        .args(["superosc", "--a", "2", "--x", "bogus", "--n", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let lines: Vec<&str> = stderr.lines().collect();
    assert_eq!(lines.len(), 1, "stderr: {stderr}");
    assert!(lines[0].starts_with("ERROR 2 "), "stderr: {stderr}");
}

#[test]
fn numeric_error_exits_three() {
    // cos t vanishes at t = pi/2; the harmonic evolution is singular there.
    let out = bin()
        .args([
            "evolve", "--potential", "harmonic", "--a", "2",
            "--t", "1.5707963267948966:1.5707963267948966:1", "--x", "0:1:1", "--n", "4",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("ERROR 3 "), "stderr: {stderr}");
}

#[test]
fn reports_are_byte_identical_across_worker_counts() {
    let run = |jobs: &str| {
        let out = bin()
            .args([
                "--jobs", jobs, "superosc", "--a", "2", "--x", "-2:2:0.25",
                "--n", "10,20,40,80",
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn env_var_overrides_precision_flag() {
    let out = bin()
        .args(["--precision", "256", "superosc", "--a", "2", "--x", "0:1:1", "--n", "4,8"])
        .env("SUPERSHIFT_LAB_PRECISION", "128")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["precision_bits_used"], 128);
}

#[test]
fn smoothing_output_feeds_back_into_the_checker() {
    let dir = tempfile::tempdir().unwrap();
    let kink = dir.path().join("kink.json");
    fs::write(
        &kink,
        r#"{"kind":"piecewise_poly","pieces":[{"end":0.0,"coeffs":[[0,0],[-1,0]]},{"end":null,"coeffs":[[0,0],[1,0]]}]}"#,
    )
    .unwrap();
    let smoothed = dir.path().join("smoothed.json");
    let out = bin()
        .args([
            "supershift", "convolve",
            "--psi", kink.to_str().unwrap(),
            "--interval", "-1.15,1.15",
            "--support", "0.25",
        ])
        .args(["--out", smoothed.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let out = bin()
        .args([
            "supershift", "check",
            "--psi", smoothed.to_str().unwrap(),
            "--interval", "-1.15,1.15",
            "--grid-step", "0.25",
            "--n", "20,40",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["verdict"], true);
}

#[test]
fn csv_format_renders_a_table() {
    let out = bin()
        .args([
            "--format", "csv", "superosc", "--a", "2", "--x", "0:1:0.5", "--n", "4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let header = text.lines().next().unwrap();
    assert!(header.split(',').any(|c| c == "abs_err"), "header: {header}");
    assert_eq!(text.lines().count(), 4, "{text}");
}
