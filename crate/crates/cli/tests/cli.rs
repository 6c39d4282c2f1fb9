use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn orbitframe(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_orbitframe"));
    for (k, _) in std::env::vars() {
        if k.starts_with("ORBITFRAME_") {
            cmd.env_remove(k);
        }
    }
    cmd.args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = orbitframe(args);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn error_of(out: &Output) -> Value {
    assert!(out.stdout.is_empty(), "no partial report on failure");
    serde_json::from_slice::<Value>(&out.stderr).expect("stderr is one JSON object")["error"].clone()
}

#[test]
fn demo_aldroubi() {
    let r = ok_json(&["--demo", "aldroubi"]);
    assert_eq!(r["results"]["frame"]["classification"], "OVERCOMPLETE_FRAME_FOR_SPAN");
    assert!(r["results"]["frame"]["lower_bound"].as_f64().unwrap() > 0.0);
    assert_eq!(r["results"]["representation"]["verdict"], "BOUNDED_LIKELY");
    assert_eq!(r["provenance"]["tool"], "orbitframe");
    assert_eq!(r["tolerance"]["rank_rel"], 1e-10);
    assert_eq!(r["config"]["command"], "demo");
}

#[test]
fn demo_two_onb_alternate() {
    let r = ok_json(&["--demo", "two-onb-alternate"]);
    let res = &r["results"];
    assert_eq!(res["verdict"], "UNBOUNDED_LIKELY");
    assert_eq!(res["interleaving"]["I2"], json!([]));
    assert_eq!(res["interleaving"]["I4"], json!([]));
    assert_eq!(res["interleaving"]["predicted_unbounded"], true);
    let norms: Vec<f64> = res["norm_profile"].as_array().unwrap().iter().map(|p| p[1].as_f64().unwrap()).collect();
    assert!(norms.windows(2).all(|w| w[1] > w[0]), "{norms:?}");
}

#[test]
fn demo_sinc_half_shift_and_gabor_thirds() {
    let r = ok_json(&["--demo", "sinc-half-shift"]);
    assert_eq!(r["results"]["b_1"]["classification"], "RIESZ_BASIS");
    assert_eq!(r["results"]["b_half"]["classification"], "FRAME_SEQUENCE_NOT_RIESZ");
    let r = ok_json(&["--demo", "gabor-thirds"]);
    assert_ne!(r["results"]["sweep"]["verdict"], "BOUNDED_LIKELY");
    assert!(r["results"]["even_kernel"]["dimension"].as_u64().unwrap() > 0);
}

#[test]
fn malformed_config_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"command\": \"analyze\", ").unwrap();
    let out_path = dir.path().join("report.json");
    let out = orbitframe(&["--config", path.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_of(&out)["kind"], "parse");
    assert!(!out_path.exists(), "no partial report");
}

#[test]
fn malformed_family_file_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let fam = dir.path().join("fam.json");
    std::fs::write(&fam, "[1, 2").unwrap();
    let cfg = write_config(dir.path(), "c.json", &json!({"command": "analyze", "input": "fam.json"}));
    let out = orbitframe(&["--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_of(&out)["kind"], "parse");
}

#[test]
fn exit_codes_by_kind() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (json!({"command": "analyze", "input": {"builtin": "standard", "dim": 4}, "params": {"bogus": 1}}), 4, "config"),
        (json!({"command": "analyze", "input": "missing.json"}), 5, "io"),
        (json!({"command": "represent", "input": {"builtin": "aldroubi", "dim": 30}}), 7, "representation_impossible"),
        (json!({"command": "analyze", "input": {"builtin": "standard", "dim": 4}, "tolerance": {"rank_rel": 5.0}}), 4, "invalid_tolerance"),
    ];
    for (i, (cfg, code, kind)) in cases.iter().enumerate() {
        let path = write_config(dir.path(), &format!("c{i}.json"), cfg);
        let out = orbitframe(&["--config", &path]);
        assert_eq!(out.status.code(), Some(*code), "{cfg}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(error_of(&out)["kind"], *kind);
    }
    assert_eq!(orbitframe(&[]).status.code(), Some(2), "usage error");
}

#[test]
fn deterministic_modulo_timestamp() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "command": "sweep",
        "input": {"builtin": "aldroubi"},
        "params": {"sizes": [50, 100, 200], "independence": "resolved", "tail": {"n": 5, "ms": [10, 20]}},
    });
    let path = write_config(dir.path(), "sweep.json", &cfg);
    let strip = |mut v: Value| {
        v["provenance"]["timestamp"] = Value::Null;
        serde_json::to_vec(&v).unwrap()
    };
    let a = strip(ok_json(&["--config", &path]));
    let b = strip(ok_json(&["--config", &path]));
    assert_eq!(a, b);
}

#[test]
fn family_round_trip_between_commands() {
    let dir = TempDir::new().unwrap();
    let fam_path = dir.path().join("gabor.json");
    let gabor_cfg = write_config(
        dir.path(),
        "g.json",
        &json!({"command": "gabor", "params": {"l": 12, "a": 2, "b": 3}, "family_out": "gabor.json"}),
    );
    let g = ok_json(&["--config", &gabor_cfg]);
    let written = std::fs::read_to_string(&fam_path).unwrap();

    let analyze_cfg = write_config(
        dir.path(),
        "a.json",
        &json!({"command": "analyze", "input": "gabor.json", "family_out": "again.json"}),
    );
    let a = ok_json(&["--config", &analyze_cfg]);
    assert_eq!(a["results"]["frame"], g["results"]["frame"]);
    assert_eq!(std::fs::read_to_string(dir.path().join("again.json")).unwrap(), written);
    assert_eq!(a["results"]["frame"]["excess"], 12);
}

#[test]
fn sweep_rows_and_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        &json!({"command": "sweep", "input": {"builtin": "aldroubi"}, "params": {"sizes": [50, 100, 200], "independence": "resolved"}}),
    );
    let r = ok_json(&["--config", &cfg]);
    let rows = r["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(r["results"]["verdict"], "BOUNDED_LIKELY");
    for row in rows {
        let n = row["operator_norm"].as_f64().unwrap();
        assert!((n - 1.0).abs() < 1e-3, "{row}");
    }

    let out_path = dir.path().join("s.csv");
    let out = orbitframe(&["--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("size,excess,lower_bound,upper_bound,shift_residual,operator_norm,interp_residual"));
    assert_eq!(lines.map(|l| l.split(',').next().unwrap().to_string()).collect::<Vec<_>>(), ["50", "100", "200"]);
}

#[test]
fn gabor_redundancy_one_ladder_has_no_excess() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "l.json",
        &json!({"command": "sweep", "input": {"builtin": "gabor-ladder", "a": 1, "b": "L"}, "params": {"sizes": [8, 12, 16]}}),
    );
    let r = ok_json(&["--config", &cfg]);
    for row in r["results"]["rows"].as_array().unwrap() {
        assert_eq!(row["excess"], 0, "{row}");
    }
    assert_eq!(r["results"]["excess_trend"], "CONSTANT");

    // the Gauss window's spectrum decays like e^{-πL/4}, below the rank cutoff by L = 32
    let cfg = write_config(
        dir.path(),
        "l32.json",
        &json!({"command": "sweep", "input": {"builtin": "gabor-ladder", "a": 1, "b": "L"}, "params": {"sizes": [8, 16, 32]}}),
    );
    let r = ok_json(&["--config", &cfg]);
    assert_eq!(r["results"]["rows"][2]["excess"], 1);
}

#[test]
fn flags_and_env_override_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "r.json",
        &json!({"command": "analyze", "input": {"builtin": "random", "dim": 6, "count": 9, "rank": 4}, "tolerance": {"rank_rel": 1e-9}}),
    );
    let a = ok_json(&["--config", &cfg, "--seed", "7", "--tol-rank", "1e-6"]);
    assert_eq!(a["tolerance"]["rank_rel"], 1e-6);
    assert_eq!(a["config"]["seed"], 7);
    assert_eq!(a["results"]["frame"]["rank"], 4);
    assert_eq!(a["results"]["frame"]["excess"], 5);

    let out = Command::new(env!("CARGO_BIN_EXE_orbitframe"))
        .env("ORBITFRAME_CONFIG", &cfg)
        .env("ORBITFRAME_SEED", "7")
        .env("ORBITFRAME_TOL_RANK", "1e-6")
        .env_remove("ORBITFRAME_DEMO")
        .output()
        .unwrap();
    assert!(out.status.success());
    let b: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(a["results"], b["results"]);

    let c = ok_json(&["--config", &cfg, "--seed", "8"]);
    assert_ne!(a["results"]["frame"]["upper_bound"], c["results"]["frame"]["upper_bound"]);
}

#[test]
fn shiftinv_with_translates() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "si.json",
        &json!({
            "command": "shiftinv",
            "input": {"builtin": "sinc", "grid_size": 128},
            "params": {"b": 0.5, "points": 256, "family": {"count": 128, "dim": 128, "mode": "cyclic"}},
        }),
    );
    let r = ok_json(&["--config", &cfg]);
    assert_eq!(r["results"]["classification"], "FRAME_SEQUENCE_NOT_RIESZ");
    let frame = &r["results"]["family"]["frame"];
    assert!((frame["lower_bound"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(r["results"]["family"]["translation"]["is_iterated"], true);
    assert_eq!(r["results"]["phi"]["phi_values"].as_array().unwrap().len(), 256);

    let bad = write_config(
        dir.path(),
        "bad.json",
        &json!({"command": "shiftinv", "input": {"builtin": "sinc", "grid_size": 128}, "params": {"b": 0.3, "family": {"count": 8, "dim": 100}}}),
    );
    let out = orbitframe(&["--config", &bad]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_of(&out)["kind"], "discretization");
}
