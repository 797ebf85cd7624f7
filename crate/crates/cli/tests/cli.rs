use std::path::Path;
use std::process::{Command, Output};

fn dlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlab")).args(args).output().expect("spawn dlab")
}

fn ok(args: &[&str]) -> String {
    let out = dlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn enumerate(dir: &Path, preset: &str, xmax: &str) {
    ok(&["enumerate", "--preset", preset, "--xmax", xmax, "--out", dir.to_str().unwrap()]);
}

#[test]
fn sqrt2_small_run_has_five_convergents() {
    let tmp = tempfile::tempdir().unwrap();
    enumerate(tmp.path(), "sqrt2", "30");
    let csv = std::fs::read_to_string(tmp.path().join("minimal_points.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    let pts: Vec<(&str, &str)> = rows.iter().map(|r| (r[1], r[2])).collect();
    assert_eq!(pts, [("0", "1"), ("1", "1"), ("2", "3"), ("5", "7"), ("12", "17")]);
}

#[test]
fn lambda_n_prints_golden_ratio_conjugate() {
    assert_eq!(ok(&["lambda-n", "--n", "2"]).trim(), "0.618033988749895");
    let table = ok(&["lambda-n", "--n", "4", "--table"]);
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [a.path(), b.path()] {
        enumerate(d, "cubic", "5000");
        ok(&["transfer", "--run", d.to_str().unwrap(), "--alpha", "2/5", "--beta", "3/5", "--x-min", "10"]);
    }
    for f in ["manifest.json", "target.json", "minimal_points.csv", "transfer.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
}

#[test]
fn manifest_hashes_detect_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    enumerate(d, "cubic", "2000");
    ok(&["construct", "--run", d.to_str().unwrap(), "--i0", "2"]);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap();
    assert!(manifest["files"]["family_i0_2.json"]["sha256"].is_string());
    assert!(manifest["steps"]["construct_i0_2"].is_object());
    assert!(ok(&["verify", "--run", d.to_str().unwrap()]).contains("verified"));

    std::fs::write(d.join("minimal_points.csv"), "tampered\n").unwrap();
    let out = dlab(&["verify", "--run", d.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn errors_are_json_on_stderr() {
    let tmp = tempfile::tempdir().unwrap();
    enumerate(tmp.path(), "sqrt2", "30");
    let out = dlab(&["construct", "--run", tmp.path().to_str().unwrap(), "--i0", "1"]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "DimensionTooSmall");

    let out = dlab(&["enumerate", "--preset", "nope", "--xmax", "10", "--out", tmp.path().to_str().unwrap()]);
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "Usage");
}

#[test]
fn bad_config_is_a_schema_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"n": 2, "coords": []}"#).unwrap();
    let out = dlab(&["enumerate", "--config", cfg.to_str().unwrap(), "--xmax", "10", "--out", tmp.path().join("r").to_str().unwrap()]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"]["kind"].is_string());
}

#[test]
fn precision_cap_env_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_dlab"))
        .env("DLAB_PRECISION_CAP", "lots")
        .args(["lambda-n", "--n", "2"])
        .output()
        .unwrap();
    // lambda-n does not touch the cap
    assert!(out.status.success());
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dlab"))
        .env("DLAB_PRECISION_CAP", "lots")
        .args(["enumerate", "--preset", "sqrt2", "--xmax", "30", "--out", tmp.path().to_str().unwrap()])
        .output()
        .unwrap();
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "Usage");
}

#[test]
fn svg_plots_are_written() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    enumerate(d, "sqrt2", "1000");
    ok(&["plot", "--run", d.to_str().unwrap(), "--what", "envelope"]);
    ok(&["plot", "--what", "frontier", "--n", "2", "--out", d.to_str().unwrap()]);
    for f in ["envelope.svg", "frontier_n2.svg"] {
        assert!(std::fs::read_to_string(d.join(f)).unwrap().starts_with("<svg"));
    }
}
