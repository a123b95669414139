use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use log::info;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use wez_core::data::{
    describe, filter_dataset, ColumnStats, generate_dataset, load_dataset, meta_path, pearson_matrix, save_dataset, Dataset,
    FilterRules, Sample, StatsSummary, COLUMNS, COLUMN_NAMES,
};
use wez_core::doe::{lhs_sample, load_design, save_design, scenario_rows, DesignSpec, Provenance};
use wez_core::preprocess::{split, SplitSpec};
use wez_core::sim::{MissileConfig, Scenario};
use wez_core::surrogate::{cross_validate, evaluate, train, CvReport, MlpModel, SurrogateError, TrainConfig};

use crate::sweep::sweep;
use crate::{Cli, CliError, Command, ConfigKind};

/// Contents of `train --config`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub train: TrainConfig,
    pub split: SplitSpec,
}

#[derive(Serialize, Deserialize)]
struct DesignMeta {
    spec: DesignSpec,
    provenance: Provenance,
}

#[derive(Serialize)]
struct RowCounts {
    train: usize,
    validation: usize,
    test: usize,
}

/// `metrics.json`: test-set metrics at the top level, then cross-validation.
#[derive(Serialize)]
struct MetricsReport {
    mae: f64,
    mse: f64,
    rmse: f64,
    r2: Option<f64>,
    rows: RowCounts,
    best_epoch: usize,
    epochs_run: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_validation: Option<CvReport>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(kind) = cli.print_config {
        let text = match kind {
            ConfigKind::Design => to_json(&DesignSpec::default()),
            ConfigKind::Missile => to_json(&MissileConfig::default()),
            ConfigKind::Filter => to_json(&FilterRules::default()),
            ConfigKind::Train => to_json(&TrainSettings::default()),
        };
        print!("{text}");
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(CliError::Usage("no command given; see `wez --help`".into()));
    };
    match command {
        Command::Design {
            samples,
            seed,
            iterations,
            config,
            out,
        } => design(samples, seed, iterations, config.as_deref(), &out),
        Command::Simulate {
            design,
            missile,
            jobs,
            out,
        } => simulate(&design, missile.as_deref(), jobs, &out),
        Command::Stats { data, filter, rules } => stats(&data, filter, rules.as_deref()),
        Command::Filter {
            data,
            out,
            report,
            rules,
        } => filter(&data, &out, &report, rules.as_deref()),
        Command::Train {
            data,
            config,
            out,
            metrics,
            cv,
            seed,
        } => train_cmd(&data, config.as_deref(), &out, metrics, cv, seed),
        Command::Sweep {
            model,
            scenario,
            out,
            svg,
        } => sweep_cmd(&model, &scenario, &out, svg.as_deref()),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn design(
    samples: usize,
    seed: Option<u64>,
    iterations: Option<u64>,
    config: Option<&Path>,
    out: &Path,
) -> Result<(), CliError> {
    let mut spec = match config {
        Some(p) => read_json::<DesignSpec>(p)?,
        None => DesignSpec::default(),
    };
    spec.n_samples = samples;
    if let Some(s) = seed {
        spec.seed = s;
    }
    if let Some(i) = iterations {
        spec.maximin_iterations = i;
    }
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let design = lhs_sample(&spec)?;
    let p = &design.provenance;
    info!(
        "maximin: {} of {} swaps accepted, min distance {:.6} -> {:.6}",
        p.accepted_swaps, p.iterations, p.initial_min_distance, p.min_distance
    );
    let rows = scenario_rows(&design);
    save_design(&rows, out)?;
    let meta = DesignMeta {
        spec,
        provenance: design.provenance,
    };
    write_text(&meta_path(out), &to_json(&meta))?;
    info!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

/// Seed recorded in the design's sidecar, if there is a readable one.
fn design_seed(design: &Path) -> Option<u64> {
    let text = std::fs::read_to_string(meta_path(design)).ok()?;
    serde_json::from_str::<DesignMeta>(&text).ok().map(|m| m.provenance.seed)
}

fn simulate(design: &Path, missile: Option<&Path>, jobs: Option<usize>, out: &Path) -> Result<(), CliError> {
    let missile = match missile {
        Some(p) => MissileConfig::from_json_file(p)?,
        None => MissileConfig::default(),
    };
    let rows = load_design(design)?;
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let reported = AtomicUsize::new(0);
    let generation = generate_dataset(&rows, design_seed(design), &missile, jobs, |done, total| {
        let pct = done * 100 / total;
        if reported.fetch_max(pct, Ordering::Relaxed) < pct {
            info!("simulated {done}/{total} rows ({pct}%)");
        }
    })?;
    save_dataset(&generation.dataset, out)?;
    info!(
        "wrote {} rows to {} ({} without a hitting range)",
        generation.dataset.len(),
        out.display(),
        generation.no_range
    );
    if !generation.failures.is_empty() {
        let report = out.with_extension("failures.json");
        write_text(&report, &to_json(&generation.failures))?;
        return Err(CliError::Failed(format!(
            "{} design rows failed to simulate; see {}",
            generation.failures.len(),
            report.display()
        )));
    }
    Ok(())
}

fn load_rules(rules: Option<&Path>) -> Result<FilterRules, CliError> {
    let rules = match rules {
        Some(p) => {
            let r: FilterRules = read_json(p)?;
            r.validate().map_err(|e| CliError::config(p, e))?;
            r
        }
        None => FilterRules::default(),
    };
    Ok(rules)
}

fn stats(data: &Path, apply_filter: bool, rules: Option<&Path>) -> Result<(), CliError> {
    let mut ds = load_dataset(data)?;
    if apply_filter {
        let (filtered, report) = filter_dataset(&ds, &load_rules(rules)?);
        println!("filtered {} -> {} rows", report.input_rows, report.output_rows);
        ds = filtered;
    }
    let summary = describe(&ds)?;
    print!("{}", stats_table(&summary));
    println!();
    match pearson_matrix(&ds) {
        Ok(r) => print!("{}", correlation_table(&r)),
        Err(e) => println!("correlation matrix unavailable: {e}"),
    }
    Ok(())
}

fn stats_table(s: &StatsSummary) -> String {
    let mut out = format!("{:<6}", "");
    for c in &s.columns {
        out += &format!("{:>12}", c.name);
    }
    out.push('\n');
    let rows: [(&str, fn(&ColumnStats) -> f64); 7] = [
        ("mean", |c| c.mean),
        ("std", |c| c.std),
        ("min", |c| c.min),
        ("25%", |c| c.q25),
        ("50%", |c| c.q50),
        ("75%", |c| c.q75),
        ("max", |c| c.max),
    ];
    for (label, get) in rows {
        out += &format!("{label:<6}");
        for c in &s.columns {
            out += &format!("{:>12.2}", get(c));
        }
        out.push('\n');
    }
    out += &format!("{} rows\n", s.rows);
    out
}

fn correlation_table(r: &[[f64; COLUMNS]; COLUMNS]) -> String {
    let mut out = format!("{:<10}", "");
    for name in COLUMN_NAMES {
        out += &format!("{name:>10}");
    }
    out.push('\n');
    for (name, row) in COLUMN_NAMES.iter().zip(r) {
        out += &format!("{name:<10}");
        for v in row {
            out += &format!("{v:>10.2}");
        }
        out.push('\n');
    }
    out
}

fn filter(data: &Path, out: &Path, report_path: &Path, rules: Option<&Path>) -> Result<(), CliError> {
    let ds = load_dataset(data)?;
    let (filtered, report) = filter_dataset(&ds, &load_rules(rules)?);
    save_dataset(&filtered, out)?;
    write_text(report_path, &to_json(&report))?;
    info!(
        "kept {} of {} rows (floor {}, fence {}, plausibility {})",
        report.output_rows,
        report.input_rows,
        report.floor_removed,
        report.fence_removed,
        report.plausibility.iter().map(|r| r.removed).sum::<usize>()
    );
    Ok(())
}

fn train_cmd(
    data: &Path,
    config: Option<&Path>,
    out: &Path,
    metrics: Option<PathBuf>,
    cv: bool,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let mut settings = match config {
        Some(p) => read_json::<TrainSettings>(p)?,
        None => TrainSettings::default(),
    };
    if let Some(s) = seed {
        settings.train.seed = s;
        settings.split.seed = s;
    }
    settings.train.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let ds: Dataset = load_dataset(data)?;
    let sp = split(ds.len(), &settings.split)?;
    let pick = |idx: &[usize]| -> Vec<Sample> { idx.iter().map(|&i| ds.samples[i]).collect() };
    let (train_idx, val_idx) = sp.fold_pair(0);
    let (tr, va, te) = (pick(&train_idx), pick(&val_idx), pick(&sp.test));
    info!("training on {} rows, early stopping on {}, testing on {}", tr.len(), va.len(), te.len());

    let trained = match train(&tr, &va, &settings.train) {
        Err(SurrogateError::Diverged { epoch, history }) => {
            let dump = out.with_extension("history.json");
            write_text(&dump, &to_json(&history))?;
            return Err(CliError::Failed(format!(
                "training diverged at epoch {epoch}; history written to {}",
                dump.display()
            )));
        }
        other => other?,
    };
    let model: &MlpModel = &trained.model;
    let test = evaluate(model, &te)?;
    model.save(out)?;

    let cross_validation = if cv {
        info!("cross-validating over {} folds", sp.folds.len());
        Some(cross_validate(&ds.samples, &sp, &settings.train)?)
    } else {
        None
    };
    let report = MetricsReport {
        mae: test.mae,
        mse: test.mse,
        rmse: test.rmse,
        r2: test.r2,
        rows: RowCounts {
            train: tr.len(),
            validation: va.len(),
            test: te.len(),
        },
        best_epoch: model.metadata.best_epoch,
        epochs_run: model.metadata.epochs_run,
        cross_validation,
    };
    let metrics = metrics.unwrap_or_else(|| out.with_file_name("metrics.json"));
    write_text(&metrics, &to_json(&report))?;

    print!("{}", metrics_table(&report));
    Ok(())
}

fn metrics_table(r: &MetricsReport) -> String {
    let r2 = |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{x:.4}"));
    let mut out = format!("{:<8}{:>10}{:>10}{:>10}{:>10}\n", "", "MAE", "MSE", "RMSE", "R2");
    out += &format!("{:<8}{:>10.3}{:>10.3}{:>10.3}{:>10}\n", "test", r.mae, r.mse, r.rmse, r2(r.r2));
    if let Some(cv) = &r.cross_validation {
        out.push('\n');
        for f in &cv.folds {
            let m = &f.metrics;
            let label = format!("fold {}", f.fold + 1);
            out += &format!("{label:<8}{:>10.3}{:>10.3}{:>10.3}{:>10}\n", m.mae, m.mse, m.rmse, r2(m.r2));
        }
        for (label, m) in [("mean", &cv.mean), ("std", &cv.std)] {
            out += &format!("{label:<8}{:>10.3}{:>10.3}{:>10.3}{:>10}\n", m.mae, m.mse, m.rmse, r2(m.r2));
        }
    }
    out
}

fn sweep_cmd(model: &Path, scenario: &Path, out: &Path, svg: Option<&Path>) -> Result<(), CliError> {
    let model = MlpModel::load(model)?;
    let base: Scenario = read_json(scenario)?;
    base.validate().map_err(|e| CliError::config(scenario, e))?;
    let result = sweep(&model, &base)?;
    let file = File::create(out).map_err(|e| CliError::io(out, e))?;
    let mut w = BufWriter::new(file);
    result
        .write_csv(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(out, e))?;
    if let Some(p) = svg {
        write_text(p, &result.to_svg())?;
    }
    info!(
        "swept {} angles, max adjacent change {:.3} NM",
        result.points.len(),
        result.max_jump()
    );
    Ok(())
}
