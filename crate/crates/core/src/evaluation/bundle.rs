use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bayes::BayesComparison;
use super::experiment::{MetricRow, MetricTable};
use super::importance::ImportanceReport;
use super::metrics::SummaryRow;
use crate::ingest::write_atomic;
use crate::{Error, Result};

/// Everything an evaluation run writes to its output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunBundle {
    pub table: MetricTable,
    pub summary: Vec<SummaryRow>,
    pub bayes: Vec<BayesComparison>,
    pub importance: Vec<ImportanceReport>,
    pub provenance: serde_json::Value,
}

const HEADER: [&str; 7] = ["repeat", "fold", "setting", "inducer", "target", "rmse", "r2"];

pub fn write_metrics_csv(table: &MetricTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for r in &table.rows {
        w.write_record([
            r.repeat.to_string(),
            r.fold.to_string(),
            r.setting.as_str().to_string(),
            r.inducer.as_str().to_string(),
            r.target.as_str().to_string(),
            format!("{:?}", r.rmse),
            r.r2.map(|v| format!("{v:?}")).unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    write_atomic(path, &bytes)
}

pub fn read_metrics_csv(path: &Path) -> Result<MetricTable> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::invalid(format!("{other:?}")),
    })?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::Parse {
            line: i + 2,
            message: format!("bad {what}"),
        };
        if rec.len() != HEADER.len() {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: HEADER.len(),
                found: rec.len(),
            });
        }
        rows.push(MetricRow {
            repeat: rec[0].parse().map_err(|_| bad("repeat"))?,
            fold: rec[1].parse().map_err(|_| bad("fold"))?,
            setting: rec[2].parse()?,
            inducer: rec[3].parse()?,
            target: rec[4].parse()?,
            rmse: rec[5].parse().map_err(|_| bad("rmse"))?,
            r2: if rec[6].is_empty() {
                None
            } else {
                Some(rec[6].parse().map_err(|_| bad("r2"))?)
            },
        });
    }
    Ok(MetricTable {
        rows,
        failures: Vec::new(),
    })
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// `metrics.csv`, `summary.json`, `bayes.json`, `importance.json`, `provenance.json`.
pub fn write_run_bundle(dir: &Path, bundle: &RunBundle) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_metrics_csv(&bundle.table, &dir.join("metrics.csv"))?;
    write_json(
        &serde_json::json!({ "groups": bundle.summary, "failures": bundle.table.failures }),
        &dir.join("summary.json"),
    )?;
    write_json(&bundle.bayes, &dir.join("bayes.json"))?;
    write_json(&bundle.importance, &dir.join("importance.json"))?;
    write_json(&bundle.provenance, &dir.join("provenance.json"))
}
