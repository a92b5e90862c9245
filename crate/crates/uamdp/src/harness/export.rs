//! Result export: metric CSVs, JSON-lines episode logs, the walkthrough
//! trace table, and a plot-data bundle (fan-chart quantiles, reliability
//! points, entropy traces) as plain data files.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::demo::DemoReport;
use super::log::{EpisodeLog, LoopEvent, StepRecord};
use super::regret_suite::RegretSuite;
use super::run::SeedRun;
use crate::metrics::{pit_values, ForecastRecord};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("io failure at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("serialization failure: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed log line {line}: {text}")]
    BadLogLine { line: usize, text: String },
}

fn write_file(path: &Path, contents: &str) -> Result<(), ExportError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|source| ExportError::Io { path: parent.to_path_buf(), source })?;
        }
    }
    let mut f = std::fs::File::create(path)
        .map_err(|source| ExportError::Io { path: path.to_path_buf(), source })?;
    f.write_all(contents.as_bytes())
        .map_err(|source| ExportError::Io { path: path.to_path_buf(), source })
}

/// Forecast-evaluation table: one row per (model, horizon, metric).
pub fn export_forecast_report_csv(
    path: &Path,
    rows: &[(String, usize, String, f64)],
) -> Result<(), ExportError> {
    let mut out = String::from("model,horizon,metric,value\n");
    for (model, horizon, metric, value) in rows {
        out.push_str(&format!("{model},{horizon},{metric},{value}\n"));
    }
    write_file(path, &out)
}

/// One row per (seed, metric): `seed,metric,value`.
pub fn export_metrics_csv(path: &Path, runs: &[SeedRun]) -> Result<(), ExportError> {
    let mut out = String::from("seed,metric,value\n");
    for run in runs {
        for (name, value) in &run.metrics {
            out.push_str(&format!("{},{},{}\n", run.seed, name, value));
        }
    }
    write_file(path, &out)
}

/// JSON-lines episode log (records, then events).
pub fn export_log_jsonl(path: &Path, log: &EpisodeLog) -> Result<(), ExportError> {
    write_file(path, &log.to_jsonl())
}

/// Inverse of [`export_log_jsonl`].
pub fn load_log_jsonl(path: &Path) -> Result<EpisodeLog, ExportError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ExportError::Io { path: path.to_path_buf(), source })?;
    let mut log = EpisodeLog::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if let Ok(record) = serde_json::from_str::<StepRecord>(line) {
            log.records.push(record);
        } else if let Ok(event) = serde_json::from_str::<LoopEvent>(line) {
            log.events.push(event);
        } else {
            return Err(ExportError::BadLogLine { line: i + 1, text: line.to_string() });
        }
    }
    Ok(log)
}

/// Walkthrough trace: `t,price,realized_return,mu,sigma_sq,action,equity_weight`.
pub fn export_demo_csv(path: &Path, report: &DemoReport) -> Result<(), ExportError> {
    let mut out = String::from("t,price,realized_return,mu,sigma_sq,action,equity_weight\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.t,
            row.price,
            row.realized_return.map_or(String::new(), |r| r.to_string()),
            row.mu,
            row.sigma_sq,
            row.action,
            row.equity_weight,
        ));
    }
    write_file(path, &out)
}

pub fn export_regret_csv(path: &Path, suite: &RegretSuite) -> Result<(), ExportError> {
    write_file(path, &suite.to_csv())
}

/// Generic JSON export for report structures.
pub fn export_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExportError> {
    write_file(path, &serde_json::to_string_pretty(value)?)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Plot-data bundle:
/// - `entropy.csv`: per-seed belief-entropy traces,
/// - `fanchart.csv`: cross-seed quantile envelope of portfolio value,
/// - `reliability.csv`: PIT-decile observed-vs-nominal points, when
///   forecast records are supplied.
pub fn export_plot_bundle(
    dir: &Path,
    runs: &[SeedRun],
    forecast_records: Option<&[ForecastRecord]>,
) -> Result<(), ExportError> {
    let mut entropy = String::from("seed,n,belief_entropy\n");
    for run in runs {
        for (n, h) in run.log.entropy_trace() {
            entropy.push_str(&format!("{},{},{}\n", run.seed, n, h));
        }
    }
    write_file(&dir.join("entropy.csv"), &entropy)?;

    let mut fan = String::from("step,q05,q25,q50,q75,q95\n");
    let curves: Vec<&Vec<f64>> = runs
        .iter()
        .filter_map(|r| r.equity.as_ref().map(|e| &e.values))
        .collect();
    if !curves.is_empty() {
        let horizon = curves.iter().map(|c| c.len()).min().unwrap_or(0);
        for t in 0..horizon {
            let mut column: Vec<f64> = curves.iter().map(|c| c[t]).collect();
            column.sort_by(|a, b| a.partial_cmp(b).unwrap());
            fan.push_str(&format!(
                "{},{},{},{},{},{}\n",
                t,
                quantile(&column, 0.05),
                quantile(&column, 0.25),
                quantile(&column, 0.50),
                quantile(&column, 0.75),
                quantile(&column, 0.95),
            ));
        }
    }
    write_file(&dir.join("fanchart.csv"), &fan)?;

    let mut reliability = String::from("nominal,observed\n");
    if let Some(records) = forecast_records {
        let u = pit_values(records);
        if !u.is_empty() {
            for decile in 1..=9 {
                let nominal = decile as f64 / 10.0;
                let observed =
                    u.iter().filter(|&&x| x <= nominal).count() as f64 / u.len() as f64;
                reliability.push_str(&format!("{nominal},{observed}\n"));
            }
        }
    }
    write_file(&dir.join("reliability.csv"), &reliability)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{EnvKind, RunConfig};
    use crate::harness::run::run_uamdp;

    #[test]
    fn empty_log_exports_header_only_metrics_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metrics.csv");
        export_metrics_csv(&path, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "seed,metric,value\n");
    }

    #[test]
    fn forecast_report_rows_are_model_by_horizon_by_metric() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("forecast.csv");
        let rows = vec![
            ("gp".to_string(), 1usize, "rmse".to_string(), 0.1),
            ("persistence".to_string(), 7, "crps".to_string(), 0.25),
        ];
        export_forecast_report_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "model,horizon,metric,value\ngp,1,rmse,0.1\npersistence,7,crps,0.25\n");
    }

    #[test]
    fn log_round_trip_preserves_recomputed_metrics() {
        let cfg = RunConfig {
            env: EnvKind::Trading,
            t_max: 20,
            h: 5,
            rollout_budget: 8,
            leaf_samples: 4,
            depth_limit: 2,
            path_length: 50,
            seeds: vec![7],
            ..Default::default()
        };
        let out = run_uamdp(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        export_log_jsonl(&path, &out.runs[0].log).unwrap();
        let loaded = load_log_jsonl(&path).unwrap();
        assert_eq!(loaded, out.runs[0].log);
        assert_eq!(loaded.mean_reward(), out.runs[0].log.mean_reward());
    }

    #[test]
    fn plot_bundle_writes_three_files() {
        let cfg = RunConfig {
            env: EnvKind::Trading,
            t_max: 10,
            h: 5,
            rollout_budget: 8,
            leaf_samples: 4,
            depth_limit: 2,
            path_length: 40,
            seeds: vec![1, 2],
            ..Default::default()
        };
        let out = run_uamdp(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        export_plot_bundle(dir.path(), &out.runs, None).unwrap();
        for file in ["entropy.csv", "fanchart.csv", "reliability.csv"] {
            assert!(dir.path().join(file).exists(), "{file} missing");
        }
        let fan = std::fs::read_to_string(dir.path().join("fanchart.csv")).unwrap();
        assert!(fan.lines().count() > 5);
    }

    #[test]
    fn io_failure_carries_the_path() {
        // A regular file cannot serve as a parent directory.
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("blocker");
        std::fs::write(&blocker, "x").unwrap();
        let target = blocker.join("sub").join("metrics.csv");
        let err = export_metrics_csv(&target, &[]);
        match err {
            Err(ExportError::Io { path, .. }) => {
                assert!(path.display().to_string().contains("blocker"))
            }
            other => panic!("expected io error, got {other:?}"),
        }
    }
}
