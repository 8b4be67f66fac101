use std::process::{Command, Output};

use serde_json::{json, Value};

fn p1gw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_p1gw"))
        .args(args)
        .env_remove("P1GW_PREC")
        .output()
        .expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = p1gw(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn wave_g_order_zero() {
    assert_eq!(json_of(&["wave", "--which", "g", "--order", "0"]), json!({"0": "1"}));
}

#[test]
fn wave_f_first_coefficients() {
    let v = json_of(&["wave", "--which", "f", "--order", "3", "--format", "json"]);
    assert_eq!(v["0"], "1");
    assert_eq!(v["1"], "eps^-2 - 1/24");
    assert_eq!(v["2"], "1/2*eps^-4 + 11/24*eps^-2 + 1/1152");
    assert_eq!(v["3"], "1/6*eps^-6 + 47/48*eps^-4 + 265/1152*eps^-2 + 1003/414720");
}

#[test]
fn wave_g_matches_oracle_bytes() {
    let a = p1gw(&["wave", "--which", "g", "--order", "6"]);
    let b = p1gw(&["wave-oracle", "--order", "6"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn invariant_values() {
    for (ks, value) in [
        ("0", json!({"-2": "1", "0": "-1/24"})),
        ("0,0", json!({"-2": "1"})),
        ("1", json!({})),
    ] {
        let v = json_of(&["invariant", "--ks", ks]);
        assert_eq!(v["value"], value, "ks = {ks}");
    }
}

#[test]
fn invariant_by_genus_table() {
    let v = json_of(&["invariant", "--ks", "0", "--by-genus"]);
    assert_eq!(v["by_genus"], json!({"0,1": "1", "1,0": "-1/24"}));
}

#[test]
fn malformed_ks_is_usage_error() {
    for bad in [
        &["invariant", "--ks", "x"][..],
        &["invariant", "--ks", "-1"],
        &["invariant"],
    ] {
        assert_eq!(p1gw(bad).status.code(), Some(2), "{bad:?}");
    }
}

#[test]
fn zmodel_window_error_is_computational() {
    let out = p1gw(&["zmodel", "--n", "2", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn zmodel_log_matches_free_energy() {
    let z = json_of(&["zmodel", "--n", "4", "--degree", "3", "--miwa"]);
    let f = json_of(&["free-energy", "--degree", "3"]);
    assert_eq!(z, f);
}

#[test]
fn zmodel_stabilization() {
    let v = json_of(&["zmodel", "--n", "3", "--degree", "2", "--check-stabilization"]);
    assert_eq!(v["stable"], true);
}

#[test]
fn output_is_deterministic() {
    let args = ["free-energy", "--degree", "2", "--format", "csv"];
    assert_eq!(p1gw(&args).stdout, p1gw(&args).stdout);
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!("format = \"csv\"\noutput = {:?}\n", out.to_str().unwrap()),
    )
    .unwrap();
    let r = p1gw(&["--config", cfg.to_str().unwrap(), "invariant", "--ks", "0,0"]);
    assert!(r.status.success());
    assert!(r.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("g,d,value\n"), "{text}");

    let r = p1gw(&[
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "invariant",
        "--ks",
        "1",
    ]);
    assert!(r.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["value"], json!({}));
}

#[test]
fn bad_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "precision = 64\n").unwrap();
    assert_eq!(
        p1gw(&["--config", cfg.to_str().unwrap(), "invariant", "--ks", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_p1gw"))
        .args(["charlier", "--check", "asymptotics"])
        .env("P1GW_PREC", "64")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let digits = v[0]["value"].as_str().unwrap().trim_start_matches('-').replace('.', "");
    assert!(digits.len() <= 21, "{digits}");
}

#[test]
fn charlier_rows_have_expected_shape() {
    let v = json_of(&["charlier", "--check", "limit", "--eps", "1/2", "--L", "10,20"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        for key in ["input", "value", "target", "abs_error"] {
            assert!(r.get(key).is_some(), "{key}");
        }
    }
    assert_eq!(
        p1gw(&["charlier", "--check", "limit", "--eps", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn charlier_orthogonality_passes() {
    let out = p1gw(&[
        "charlier",
        "--check",
        "orthogonality",
        "--a",
        "3/2",
        "--max-degree",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn selftest_single_check() {
    let v = json_of(&["selftest", "--only", "stabilization", "--degree", "3", "--json"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["name"], "stabilization");
    assert_eq!(rows[0]["passed"], true);
}

#[test]
fn selftest_unknown_name_is_usage_error() {
    assert_eq!(p1gw(&["selftest", "--only", "nope"]).status.code(), Some(2));
}
