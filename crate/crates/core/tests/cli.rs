//! End-to-end runs of the `qfock` binary.

use std::process::Command;

use serde_json::Value;

fn qfock(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qfock"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn every_scenario_passes_with_defaults() {
    for s in qfock::cli::SCENARIOS {
        let (code, out, err) = qfock(&[s]);
        assert_eq!(code, 0, "{s}: {err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verdict"], "pass");
    }
}

#[test]
fn report_payload_shape() {
    let (code, out, _) = qfock(&["weyl-group", "--seed", "3"]);
    assert_eq!(code, 0);
    let at = |k: &str| out.find(&format!("\n  \"{k}\":")).unwrap();
    let order = [
        "tool_version",
        "scenario",
        "config_echo",
        "checks",
        "verdict",
    ]
    .map(at);
    assert!(order.windows(2).all(|w| w[0] < w[1]));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_object().unwrap().len(), 5);
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["scenario"], "weyl-group");
    assert_eq!(v["config_echo"]["seed"], 3);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "Weyl commutation relation",
            "opposite shift inverts",
            "Weyl operators are unitary",
            "constructed unitaries and inverses"
        ]
    );
    for c in v["checks"].as_array().unwrap() {
        for k in ["name", "paper_ref", "residual", "tolerance", "pass"] {
            assert!(c.get(k).is_some(), "missing {k}");
        }
        assert!(c["residual"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn same_seed_gives_identical_bytes() {
    for s in ["verify-star", "certify-operator"] {
        let a = qfock(&[s, "--seed", "11"]).1;
        let b = qfock(&[s, "--seed", "11"]).1;
        assert_eq!(a, b);
    }
}

#[test]
fn report_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, out, _) = qfock(&["verify-exp-closed", "--report", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let (_, direct, _) = qfock(&["verify-exp-closed"]);
    assert_eq!(std::fs::read_to_string(path).unwrap(), direct);
}

#[test]
fn unbounded_symbol_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "c.toml", "[symbol]\na = [2.0, 0.0]\nb = [0.0, 0.0]\n");
    let (code, out, err) = qfock(&["certify-operator", "--config", &cfg]);
    assert_eq!(code, 1);
    assert!(err.contains("|A| > 1"));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "fail");
}

#[test]
fn expected_unboundedness_passes() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[symbol]\na = [2.0, 0.0]\nb = [0.0, 0.0]\n[expect]\nbounded = false\n";
    let cfg = write(&dir, "c.toml", body);
    assert_eq!(qfock(&["certify-operator", "--config", &cfg]).0, 0);
}

#[test]
fn isometric_operator_is_certified() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[symbol]\na = [0.0, 1.0]\nb = [0.0, 0.0]\n[weight]\ncoefficients = [[1.0, 0.0, 0.0, 0.0]]\n[expect]\nisometric = true\ncompact = false\n";
    let cfg = write(&dir, "c.toml", body);
    let (code, _, err) = qfock(&["certify-operator", "--config", &cfg]);
    assert_eq!(code, 0, "{err}");
}

#[test]
fn tolerance_override_applies_everywhere() {
    let (code, out, _) = qfock(&["verify-kernel", "--tol", "1e-30"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| (c["tolerance"].as_f64().unwrap() / 1e-30 - 1.0).abs() < 1e-12));
}

#[test]
fn coarse_truncation_fails() {
    assert_eq!(qfock(&["verify-kernel", "--truncation", "5"]).0, 1);
}

#[test]
fn non_involutive_parameters_fail() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[conjugation]\na = [1.0, 0.0]\nb = [0.0, 0.0]\nc = [0.0, 0.0]\nd = [0.6, 0.8]\n";
    let cfg = write(&dir, "c.toml", body);
    assert_eq!(qfock(&["certify-conjugation", "--config", &cfg]).0, 1);
}

#[test]
fn errors_exit_two() {
    assert_eq!(qfock(&["no-such-scenario"]).0, 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "c.toml", "unknown_key = 1\n");
    let (code, _, err) = qfock(&["verify-star", "--config", &cfg]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
    assert_eq!(
        qfock(&["verify-star", "--config", "/nonexistent/x.toml"]).0,
        2
    );
}
