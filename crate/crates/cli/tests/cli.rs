use std::path::Path;
use std::process::{Command, Output};

use wez_core::data::{load_dataset, save_dataset, Dataset, FilterReport, Sample};
use wez_core::doe::{load_design, DesignSpec};

fn wez(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wez"))
        .args(args)
        .current_dir(dir)
        .env_remove("WEZ_SEED")
        .env("RUST_LOG", "warn")
        .output()
        .expect("run wez")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = wez(dir, args);
    assert!(
        out.status.success(),
        "wez {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(wez(dir.path(), &["design", "--seed", "1", "--out", "d.csv"]).status.code(), Some(2));
    assert_eq!(wez(dir.path(), &[]).status.code(), Some(2));
    assert_eq!(wez(dir.path(), &["design", "--samples", "1", "--out", "d.csv"]).status.code(), Some(2));
    assert_eq!(wez(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn design_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["design", "--samples", "100", "--seed", "7", "--out", "a.csv"]);
    ok(d, &["design", "--samples", "100", "--seed", "7", "--out", "b.csv"]);
    assert_eq!(read(d, "a.csv"), read(d, "b.csv"));
    assert_eq!(read(d, "a.meta.json"), read(d, "b.meta.json"));
    ok(d, &["design", "--samples", "100", "--seed", "8", "--out", "c.csv"]);
    assert_ne!(read(d, "a.csv"), read(d, "c.csv"));
    assert_eq!(load_design(&d.join("a.csv")).unwrap().len(), 100);
}

#[test]
fn seed_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["design", "--samples", "30", "--seed", "11", "--out", "flag.csv"]);
    let out = Command::new(env!("CARGO_BIN_EXE_wez"))
        .args(["design", "--samples", "30", "--out", "env.csv"])
        .current_dir(d)
        .env("WEZ_SEED", "11")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read(d, "flag.csv"), read(d, "env.csv"));
}

#[test]
fn config_bounds_override_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut spec = DesignSpec::default();
    spec.variables[0].min = 20_000.0;
    spec.variables[0].max = 21_000.0;
    std::fs::write(d.join("cfg.json"), serde_json::to_string(&spec).unwrap()).unwrap();
    ok(d, &["design", "--samples", "40", "--seed", "1", "--config", "cfg.json", "--out", "d.csv"]);
    let rows = load_design(&d.join("d.csv")).unwrap();
    assert!(rows.iter().all(|s| (20_000.0..=21_000.0).contains(&s.alt_sht)));
    std::fs::write(d.join("bad.json"), r#"{"n_samples": 5, "colour": 1}"#).unwrap();
    let out = wez(d, &["design", "--samples", "40", "--config", "bad.json", "--out", "e.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));
}

#[test]
fn simulate_is_independent_of_job_count() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["design", "--samples", "24", "--seed", "2", "--iterations", "200", "--out", "design.csv"]);
    ok(d, &["simulate", "--design", "design.csv", "--jobs", "1", "--out", "one.csv"]);
    ok(d, &["simulate", "--design", "design.csv", "--jobs", "4", "--out", "four.csv"]);
    assert_eq!(read(d, "one.csv"), read(d, "four.csv"));
    assert_eq!(read(d, "one.meta.json"), read(d, "four.meta.json"));
    let ds = load_dataset(&d.join("one.csv")).unwrap();
    assert_eq!(ds.len(), 24);
    assert_eq!(ds.meta.design_seed, Some(2));

    let out = wez(d, &["simulate", "--design", "design.csv", "--missile", "missing.json", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
}

#[test]
fn filter_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut samples: Vec<Sample> = (0..40)
        .map(|i| Sample::from_array([1e4 + 100.0 * i as f64, 450.0, 0.0, 1e4, 450.0 + i as f64, 180.0, 0.0, 3.0 + 0.4 * i as f64]))
        .collect();
    samples.push(Sample::from_array([1e4, 450.0, 0.0, 1e4, 450.0, 180.0, 0.0, 0.08]));
    save_dataset(&Dataset::from_samples(samples), &d.join("in.csv")).unwrap();
    ok(d, &["filter", "--data", "in.csv", "--out", "out.csv", "--report", "report.json"]);
    let report: FilterReport = serde_json::from_slice(&read(d, "report.json")).unwrap();
    assert!(report.floor_removed >= 1);
    let out = load_dataset(&d.join("out.csv")).unwrap();
    assert!(out.samples.iter().all(|s| s.max_range <= report.fence.unwrap()));

    let text = String::from_utf8(ok(d, &["stats", "--data", "out.csv"]).stdout).unwrap();
    assert!(text.contains("max_range") && text.contains("25%"));

    std::fs::write(d.join("broken.csv"), "alt_sht,vel_sht,pit_sht,alt_tgt,vel_tgt,hdg_tgt,rgt_tgt,max_range\n1,2,3\n").unwrap();
    let out = wez(d, &["stats", "--data", "broken.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn train_then_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // Synthetic smooth labels keep this fast; the real pipeline is exercised by the acceptance run.
    let samples: Vec<Sample> = (0..150)
        .map(|i| {
            let t = i as f64 / 150.0;
            let hdg = -180.0 + 360.0 * ((i * 37) % 150) as f64 / 150.0;
            let rgt = -60.0 + 120.0 * ((i * 53) % 150) as f64 / 150.0;
            Sample::from_array([1e3 + 44e3 * t, 500.0, 0.0, 2e4, 500.0, hdg, rgt, 5.0 + 20.0 * t])
        })
        .collect();
    save_dataset(&Dataset::from_samples(samples), &d.join("data.csv")).unwrap();
    let cfg = r#"{"train": {"hidden_layers": [16, 16], "max_epochs": 20}}"#;
    std::fs::write(d.join("train.json"), cfg).unwrap();
    let args = ["train", "--data", "data.csv", "--config", "train.json", "--out", "model.json", "--cv", "--seed", "3"];
    let text = String::from_utf8(ok(d, &args).stdout).unwrap();
    assert!(text.contains("fold 5") && text.contains("mean") && text.contains("std"));
    let metrics: serde_json::Value = serde_json::from_slice(&read(d, "metrics.json")).unwrap();
    for key in ["mae", "mse", "rmse", "r2"] {
        assert!(metrics[key].is_number(), "{key}");
    }
    assert_eq!(metrics["cross_validation"]["folds"].as_array().unwrap().len(), 5);
    let first = read(d, "metrics.json");
    ok(d, &args);
    assert_eq!(read(d, "metrics.json"), first);

    std::fs::write(
        d.join("base.json"),
        r#"{"alt_sht":20000,"vel_sht":500,"pit_sht":0,"alt_tgt":20000,"vel_tgt":500,"hdg_tgt":180,"rgt_tgt":0}"#,
    )
    .unwrap();
    ok(d, &["sweep", "--model", "model.json", "--scenario", "base.json", "--out", "sweep.csv", "--svg", "wez.svg"]);
    let csv = String::from_utf8(read(d, "sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 242);
    assert_eq!(csv.lines().next(), Some("rgt_deg,max_range_nm"));
    assert!(String::from_utf8(read(d, "wez.svg")).unwrap().contains("<svg"));

    std::fs::write(d.join("partial.json"), r#"{"alt_sht":20000}"#).unwrap();
    let out = wez(d, &["sweep", "--model", "model.json", "--scenario", "partial.json", "--out", "s.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let out = wez(d, &["sweep", "--model", "data.csv", "--scenario", "base.json", "--out", "s.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn printed_configs_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for kind in ["design", "missile", "filter", "train"] {
        let out = ok(d, &["--print-config", kind]);
        let file = format!("{kind}.json");
        std::fs::write(d.join(&file), &out.stdout).unwrap();
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap();
    }
    ok(d, &["design", "--samples", "6", "--config", "design.json", "--iterations", "10", "--out", "d.csv"]);
    ok(d, &["simulate", "--design", "d.csv", "--missile", "missile.json", "--jobs", "1", "--out", "ds.csv"]);
    ok(d, &["filter", "--data", "ds.csv", "--out", "f.csv", "--report", "r.json", "--rules", "filter.json"]);
    let out = wez(d, &["filter", "--data", "missing.csv", "--out", "o.csv", "--report", "r.json"]);
    assert_eq!(out.status.code(), Some(1));
}
