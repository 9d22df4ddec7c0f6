//! End-to-end tests of the command-line interface: exit codes, artifact
//! layout, determinism, and the artifact round trip.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hartree_core::{io, EnergyContext, NonlinearitySpec, OperatorParams, SignMode};

fn hartree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hartree"))
        .args(args)
        .env_remove("HARTREE_OUT")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: serde_json::Value) -> String {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn quick_solve_config() -> serde_json::Value {
    serde_json::json!({
        "dimension": 1,
        "n": 63,
        "m": 1.0,
        "omega": 0.5,
        "lambda": 1.0,
        "nonlinearity": {"kind": "loglike"},
        "path_nodes": 21,
        "seed": 3
    })
}

const ARTIFACTS: [&str; 7] = [
    "u_plus.field",
    "u_minus.field",
    "report_plus.json",
    "report_minus.json",
    "diagnostics_plus.csv",
    "diagnostics_minus.csv",
    "manifest.json",
];

#[test]
fn solve_writes_deterministic_artifacts_and_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "cfg.json", quick_solve_config());
    let out_a = tmp.path().join("run_a");
    let out_b = tmp.path().join("run_b");

    let run_a = hartree(&["solve", "--config", &cfg, "--out", out_a.to_str().unwrap()]);
    assert!(
        run_a.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&run_a.stderr)
    );
    let run_b = hartree(&["solve", "--config", &cfg, "--out", out_b.to_str().unwrap()]);
    assert!(run_b.status.success());

    for name in ARTIFACTS {
        let a = fs::read(out_a.join(name)).unwrap_or_else(|_| panic!("missing {name}"));
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "artifact {name} differs between identical runs");
    }

    // loading the stored field reproduces the recorded stationary residual
    let loaded = io::read_field(&out_a.join("u_plus.field")).unwrap();
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(out_a.join("report_plus.json")).unwrap()).unwrap();
    let recorded = report["residual_stationary"].as_f64().unwrap();
    let ctx = EnergyContext::new(
        loaded.field.domain(),
        OperatorParams::new(1.0, 0.5, 1.0).unwrap(),
        NonlinearitySpec::loglike(hartree_core::Dimension::One),
    )
    .unwrap()
    .with_sign(SignMode::Plus);
    let recomputed = ctx.residual_stationary(&loaded.field);
    assert!(
        (recomputed - recorded).abs() <= 1e-12,
        "round trip drifted: {recomputed} vs {recorded}"
    );
    assert!(report["converged"].as_bool().unwrap());
    assert!(report["min_value"].as_f64().unwrap() > 0.0);
}

#[test]
fn validation_failure_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    // omega = m violates the small-amplitude margin
    let mut bad = quick_solve_config();
    bad["omega"] = serde_json::json!(1.0);
    let cfg = write_config(tmp.path(), "bad.json", bad);
    let out = hartree(&["solve", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("machine-readable reason");
    assert_eq!(err["error"]["code"], 2);
    assert_eq!(err["error"]["kind"], "validation");
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg_body = quick_solve_config();
    cfg_body["tolerance_typo"] = serde_json::json!(1e-8);
    let cfg = write_config(tmp.path(), "typo.json", cfg_body);
    let out = hartree(&["solve", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn geometry_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "flat.json",
        serde_json::json!({
            "dimension": 1, "n": 31, "m": 1.0, "omega": 0.0, "lambda": 0.0,
            "nonlinearity": {"kind": "zero"}
        }),
    );
    let out = hartree(&["solve", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "geometry");
}

#[test]
fn nonconvergence_exits_4_with_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg_body = quick_solve_config();
    cfg_body["max_sweeps"] = serde_json::json!(2);
    cfg_body["polish_attempts"] = serde_json::json!(0);
    let cfg = write_config(tmp.path(), "short.json", cfg_body);
    let out_dir = tmp.path().join("short_run");
    let out = hartree(&["solve", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    for name in ARTIFACTS {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
}

#[test]
fn hypotheses_table_for_loglike() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "hyp.json", quick_solve_config());
    let out = hartree(&["hypotheses", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["growth", "superquadratic", "quasimonotone", "small_s"] {
        let line = text
            .lines()
            .find(|l| l.starts_with(name))
            .unwrap_or_else(|| panic!("no row for {name}"));
        assert!(line.contains("pass"), "{line}");
    }
    for mu in ["2.01", "2.1", "3"] {
        let line = text
            .lines()
            .find(|l| l.contains(&format!("mu={mu}")))
            .unwrap_or_else(|| panic!("no A-R row for mu={mu}"));
        assert!(line.contains("fails"), "{line}");
        assert!(line.contains("witness"), "{line}");
    }
}

#[test]
fn hypotheses_table_for_power_includes_holding_ar() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "pow.json",
        serde_json::json!({
            "dimension": 1, "n": 31,
            "nonlinearity": {"kind": "power", "r": 3.0}
        }),
    );
    let out = hartree(&["hypotheses", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let ar_line = text.lines().find(|l| l.contains("mu=3")).unwrap();
    assert!(ar_line.contains("holds"), "{ar_line}");
}

#[test]
fn hypotheses_rejects_critical_exponent() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "badr.json",
        serde_json::json!({
            "dimension": 1, "n": 31,
            "nonlinearity": {"kind": "power", "r": 2.0}
        }),
    );
    let out = hartree(&["hypotheses", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_quick_passes() {
    let out = hartree(&["verify", "--quick", "--seed", "7"]);
    assert!(
        out.status.success(),
        "stdout: {}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("trace_bound"));
    assert!(text.contains("all"));
}

#[test]
fn export_produces_plot_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "cfg.json", quick_solve_config());
    let run_dir = tmp.path().join("run");
    let solve = hartree(&["solve", "--config", &cfg, "--out", run_dir.to_str().unwrap()]);
    assert!(solve.status.success());

    let out = hartree(&["export", "--dir", run_dir.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let profile = fs::read_to_string(run_dir.join("export/profile.csv")).unwrap();
    let mut lines = profile.lines();
    assert_eq!(lines.next().unwrap(), "x,u_plus,u_minus,phi");
    assert_eq!(lines.count(), 63);
    assert!(run_dir.join("export/path_energy_plus.csv").exists());
    assert!(run_dir.join("export/path_energy_minus.csv").exists());
    let ray = fs::read_to_string(run_dir.join("export/ray_plus.csv")).unwrap();
    assert!(ray.lines().count() > 3);
}

#[test]
fn export_missing_artifacts_exits_5() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hartree(&["export", "--dir", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn export_2d_writes_long_format() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "cfg2d.json",
        serde_json::json!({
            "dimension": 2, "n": 15, "m": 1.0, "omega": 0.3, "lambda": 1.0,
            "nonlinearity": {"kind": "loglike"},
            "path_nodes": 15
        }),
    );
    let run_dir = tmp.path().join("run2d");
    let solve = hartree(&["solve", "--config", &cfg, "--out", run_dir.to_str().unwrap()]);
    assert!(
        solve.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&solve.stderr)
    );
    let out = hartree(&["export", "--dir", run_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let table = fs::read_to_string(run_dir.join("export/u_plus.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "x1,x2,value");
    assert_eq!(lines.count(), 15 * 15);
}

#[test]
fn sweep_runs_each_value() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "cfg.json", quick_solve_config());
    let root = tmp.path().join("sweeps");
    let out = hartree(&[
        "sweep",
        "--config",
        &cfg,
        "--param",
        "lambda",
        "--values",
        "0.5,1.0",
        "--out",
        root.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    for value in ["0.5", "1"] {
        let dir = root.join("sweep_lambda").join(format!("lambda_{value}"));
        assert!(dir.join("manifest.json").exists(), "missing {}", dir.display());
    }
}
