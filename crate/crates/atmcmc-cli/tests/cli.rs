//! End-to-end tests driving the compiled `atmcmc` binary.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atmcmc"))
        .args(args)
        .output()
        .expect("failed to launch binary")
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn sample_writes_trace_and_metadata() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "sample.cfg",
        "experiment = sample\nseed = 42\nd = 3\nn_iter = 100\nthin = 20\n",
    );
    let out = tmp.path().join("out");
    let res = run(&["sample", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let trace = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next().unwrap(), "iter,coord_1,coord_2,coord_3,accepted_cum");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5, "100 iterations thinned by 20");
    assert!(rows[0].starts_with("20,"));
    assert!(rows[4].starts_with("100,"));

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["experiment"], "sample");
    assert_eq!(meta["rng_algorithm"], "chacha8");
    assert_eq!(meta["config"]["seed"], 42);
    assert_eq!(meta["config"]["d"], 3);
}

#[test]
fn identical_invocations_regenerate_identical_outputs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "sample.cfg",
        "experiment = sample\nseed = 7\nd = 2\nn_iter = 200\n",
    );
    for out in ["a", "b"] {
        let res = run(&["sample", "--config", &cfg, "--out", tmp.path().join(out).to_str().unwrap()]);
        assert!(res.status.success());
    }
    let a = std::fs::read_to_string(tmp.path().join("a/trace.csv")).unwrap();
    let b = std::fs::read_to_string(tmp.path().join("b/trace.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_flag_overrides_config_seed() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "sample.cfg",
        "experiment = sample\nseed = 7\nd = 2\nn_iter = 100\n",
    );
    let base = tmp.path().join("base");
    let over = tmp.path().join("over");
    assert!(run(&["sample", "--config", &cfg, "--out", base.to_str().unwrap()]).status.success());
    assert!(run(&["sample", "--config", &cfg, "--out", over.to_str().unwrap(), "--seed", "8"])
        .status
        .success());
    let a = std::fs::read_to_string(base.join("trace.csv")).unwrap();
    let b = std::fs::read_to_string(over.join("trace.csv")).unwrap();
    assert_ne!(a, b);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(over.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["seed"], 8);
}

#[test]
fn invalid_config_exits_one_and_names_the_field() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(tmp.path(), "bad.cfg", "experiment = sample\nseed = 1\nl = -1\n");
    let res = run(&["sample", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("`l`"), "{stderr}");
}

#[test]
fn missing_config_file_exits_one() {
    let tmp = TempDir::new().unwrap();
    let res = run(&[
        "sample",
        "--config",
        tmp.path().join("nope.cfg").to_str().unwrap(),
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn unknown_key_exits_one_with_line_number() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(tmp.path(), "bad.cfg", "experiment = sample\nseed = 1\nsead = 2\n");
    let res = run(&["sample", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("line 3") && stderr.contains("sead"), "{stderr}");
}

#[test]
fn bench_table_has_row_per_cell() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "bench.cfg",
        "experiment = bench-table\nseed = 2\ndims = 2,5\nscalings = 2.4,6\nn_iter = 500\n",
    );
    let out = tmp.path().join("out");
    let res = run(&[
        "bench-table",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = std::fs::read_to_string(out.join("bench_table.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2 * 2 * 2, "dims x scalings x kernels");
    for row in rows {
        let rate: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&rate), "{row}");
    }
}

#[test]
fn ks_experiment_series_shrinks_toward_zero() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "ks.cfg",
        "experiment = ks-experiment\nseed = 3\nd = 2\nchains = 100\nhorizon = 400\nx0 = 3\n",
    );
    let out = tmp.path().join("out");
    let res = run(&["ks-experiment", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = std::fs::read_to_string(out.join("ks_series.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    // Every iteration recorded up to 200, every 10th thereafter.
    assert_eq!(rows.len(), 200 + 20);
    let first = &rows[0];
    let last = rows.last().unwrap();
    for col in [1, 2] {
        assert!(last[col] < first[col], "KS should fall as chains mix (col {col})");
        assert!(last[col] < 0.3);
    }
}

#[test]
fn scaling_curves_outputs_summary_near_known_optima() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "sc.cfg",
        "experiment = scaling-curves\nseed = 1\ngrid_points = 40\n",
    );
    let out = tmp.path().join("out");
    let res = run(&["scaling-curves", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("scaling_summary.json")).unwrap())
            .unwrap();
    let a_rw = summary["rwmh"]["alpha_opt"].as_f64().unwrap();
    let a_at = summary["atmcmc"]["alpha_opt"].as_f64().unwrap();
    assert!((a_rw - 0.234).abs() < 0.005, "{a_rw}");
    assert!((a_at - 0.439).abs() < 0.005, "{a_at}");
    let csv = std::fs::read_to_string(out.join("scaling_curve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 41, "header + grid_points rows");
}

#[test]
fn drift_and_moments_reports_parse() {
    let tmp = TempDir::new().unwrap();
    let dcfg = write_cfg(
        tmp.path(),
        "drift.cfg",
        "experiment = drift-check\nseed = 4\nd = 2\nmc_size = 5000\nprobe = 10\n",
    );
    let dout = tmp.path().join("drift");
    assert!(run(&["drift-check", "--config", &dcfg, "--out", dout.to_str().unwrap()])
        .status
        .success());
    let drift: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dout.join("drift_report.json")).unwrap())
            .unwrap();
    assert!(drift["estimate"].as_f64().unwrap() < 1.0, "contractive far from the mode");

    let mcfg = write_cfg(
        tmp.path(),
        "moments.cfg",
        "experiment = moments-check\nseed = 5\nmc_size = 20000\n",
    );
    let mout = tmp.path().join("moments");
    assert!(run(&["moments-check", "--config", &mcfg, "--out", mout.to_str().unwrap()])
        .status
        .success());
    let moments: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(mout.join("moments_report.json")).unwrap())
            .unwrap();
    let m1 = moments["m1"]["estimate"].as_f64().unwrap();
    let m2 = moments["m2"]["estimate"].as_f64().unwrap();
    assert!((m1 - 105.0).abs() < 40.0, "{m1}");
    assert!((m2 - 60.0).abs() < 25.0, "{m2}");
}

#[test]
fn declared_experiment_must_match_subcommand() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(tmp.path(), "x.cfg", "experiment = bench-table\nseed = 1\n");
    let res = run(&["sample", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
}
