use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::plot::violin_svg;
use super::usage;
use crate::base_eval::{build_targets, read_targets, write_targets, PerformanceRecord};
use crate::evaluation::{
    full_data_importance, read_metrics_csv, run_experiment, standard_comparisons, summarize_table, write_run_bundle,
    Metric, RunBundle,
};
use crate::ingest::{load_arff_with_target, load_csv, validate, write_atomic, Dataset, OpenMlClient};
use crate::metadb::{self, assemble, preprocess};
use crate::metafeatures::{extract_all, read_batch_csv, write_batch_csv};
use crate::{Error, Result};

pub const METAFEATURES_FILE: &str = "metafeatures.csv";
pub const REJECTED_FILE: &str = "rejected.json";
pub const TARGETS_FILE: &str = "targets.csv";
pub const RAW_DB_FILE: &str = "metadb_raw.csv";
pub const DB_FILE: &str = "metadb.csv";
pub const DB_PROVENANCE_FILE: &str = "metadb.provenance.json";
pub const RUN_DIR: &str = "run";

/// A source that did not make it into the meta-feature batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub source: String,
    pub dataset: Option<String>,
    pub reasons: Vec<String>,
}

fn client(cfg: &PipelineConfig) -> OpenMlClient {
    OpenMlClient::new(cfg.openml.endpoint.clone(), cfg.openml.cache_dir.clone())
}

fn load_path(path: &Path, target: Option<&str>) -> Result<Dataset> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("arff") => load_arff_with_target(path, target),
        Some("csv") => load_csv(path, target.unwrap_or("class")),
        _ => Err(Error::invalid(format!("{}: expected a .csv or .arff file", path.display()))),
    }
}

/// Loads every source in configuration order. Sources that fail to load are
/// a data error; validation happens afterwards.
fn load_sources(cfg: &PipelineConfig) -> Result<Vec<(String, Dataset)>> {
    if cfg.sources.paths.is_empty() && cfg.sources.openml_ids.is_empty() {
        return Err(usage("no dataset sources configured (sources.paths or sources.openml_ids)"));
    }
    let mut out = Vec::new();
    for p in &cfg.sources.paths {
        out.push((p.display().to_string(), load_path(p, cfg.sources.target.as_deref())?));
    }
    let client = client(cfg);
    for &id in &cfg.sources.openml_ids {
        out.push((format!("openml:{id}"), client.fetch(id)?));
    }
    Ok(out)
}

/// Datasets passing the criteria, with unique names, plus the rejections.
fn accepted_datasets(cfg: &PipelineConfig) -> Result<(Vec<(String, Dataset)>, Vec<Rejection>)> {
    let mut accepted: Vec<(String, Dataset)> = Vec::new();
    let mut rejected = Vec::new();
    for (source, ds) in load_sources(cfg)? {
        let report = validate(&ds, &cfg.criteria);
        let mut reasons: Vec<String> = report.violations.iter().map(|v| v.message.clone()).collect();
        if accepted.iter().any(|(_, a)| a.name == ds.name) {
            reasons.push(format!("duplicate dataset name `{}`", ds.name));
        }
        if reasons.is_empty() {
            accepted.push((source, ds));
        } else {
            rejected.push(Rejection {
                source,
                dataset: Some(ds.name),
                reasons,
            });
        }
    }
    Ok((accepted, rejected))
}

fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Validates and characterizes every source; writes [`METAFEATURES_FILE`] and
/// [`REJECTED_FILE`] and returns the path of the former.
pub fn cmd_characterize(cfg: &PipelineConfig) -> Result<PathBuf> {
    let (accepted, mut rejected) = accepted_datasets(cfg)?;
    let results: Vec<_> = accepted
        .par_iter()
        .map(|(source, ds)| (source, ds, extract_all(ds, &cfg.extraction)))
        .collect();
    let mut vectors = Vec::new();
    for (source, ds, result) in results {
        match result {
            Ok(v) => vectors.push(v),
            Err(e) => rejected.push(Rejection {
                source: source.clone(),
                dataset: Some(ds.name.clone()),
                reasons: vec![format!("extraction failed: {e}")],
            }),
        }
    }
    let out = cfg.out.join(METAFEATURES_FILE);
    write_json(&rejected, &cfg.out.join(REJECTED_FILE))?;
    if vectors.is_empty() {
        return Err(Error::invalid("no dataset was accepted for characterization"));
    }
    log::info!("characterized {} datasets, rejected {}", vectors.len(), rejected.len());
    write_batch_csv(&vectors, &out)?;
    Ok(out)
}

/// Computes base-learner AUCs for every accepted dataset; failures stay as rows.
pub fn cmd_targets(cfg: &PipelineConfig) -> Result<PathBuf> {
    let (accepted, _) = accepted_datasets(cfg)?;
    let datasets: Vec<Dataset> = accepted.into_iter().map(|(_, ds)| ds).collect();
    let records = build_targets(&datasets, cfg.base_eval.folds, cfg.base_eval.seed);
    let out = cfg.out.join(TARGETS_FILE);
    write_targets(&records, &out)?;
    Ok(out)
}

/// Joins meta-features and targets by dataset name, then prunes, drops
/// correlated columns and imputes.
pub fn cmd_assemble(cfg: &PipelineConfig) -> Result<PathBuf> {
    let vectors = read_batch_csv(&cfg.out.join(METAFEATURES_FILE))?;
    let records = read_targets(&cfg.out.join(TARGETS_FILE))?;
    let joined: Vec<PerformanceRecord> = vectors
        .iter()
        .map(|v| {
            records
                .iter()
                .find(|r| r.dataset_name == v.dataset)
                .cloned()
                .ok_or_else(|| Error::invalid(format!("no targets recorded for dataset `{}`", v.dataset)))
        })
        .collect::<Result<_>>()?;
    let raw = assemble(&vectors, &joined)?;
    metadb::write_csv(&raw, &cfg.out.join(RAW_DB_FILE))?;
    let db = preprocess(&raw, &cfg.preprocess)?;
    let out = cfg.out.join(DB_FILE);
    metadb::write_csv(&db, &out)?;
    metadb::write_provenance(&db.provenance, &cfg.out.join(DB_PROVENANCE_FILE))?;
    Ok(out)
}

/// Runs the experiment on the preprocessed meta-database and writes the run bundle.
pub fn cmd_evaluate(cfg: &PipelineConfig) -> Result<RunBundle> {
    let mut db = metadb::read_csv(&cfg.out.join(DB_FILE), metadb::target_names().len())?;
    let prov_path = cfg.out.join(DB_PROVENANCE_FILE);
    if prov_path.exists() {
        db.provenance = metadb::read_provenance(&prov_path)?;
    }
    let exp = cfg.experiment();
    let table = run_experiment(&db, &exp)?;
    let summary = summarize_table(&table);
    let bayes = standard_comparisons(&table, cfg.rho(), cfg.evaluation.rope)?;
    let importance = full_data_importance(&db, &exp, cfg.evaluation.top_k)?;
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let provenance = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp_unix": timestamp,
        "config": cfg,
        "config_toml": cfg.to_toml()?,
        "rho": cfg.rho(),
        "meta_instances": db.n_rows(),
        "feature_names": db.feature_names,
        "metadb_steps": db.provenance,
    });
    let bundle = RunBundle {
        table,
        summary,
        bayes,
        importance,
        provenance,
    };
    write_run_bundle(&cfg.out.join(RUN_DIR), &bundle)?;
    Ok(bundle)
}

/// Writes `rmse.svg` and `r2.svg` next to the run's `metrics.csv`.
pub fn cmd_plot(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let dir = cfg.out.join(RUN_DIR);
    let table = read_metrics_csv(&dir.join("metrics.csv"))?;
    let mut written = Vec::new();
    for (metric, name) in [(Metric::Rmse, "rmse.svg"), (Metric::R2, "r2.svg")] {
        let path = dir.join(name);
        write_atomic(&path, violin_svg(&table, metric)?.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

/// Populates the OpenML cache for every configured id.
pub fn cmd_fetch(cfg: &PipelineConfig) -> Result<()> {
    if cfg.sources.openml_ids.is_empty() {
        return Err(usage("no OpenML ids configured (sources.openml_ids)"));
    }
    let client = client(cfg);
    for &id in &cfg.sources.openml_ids {
        let ds = client.fetch(id)?;
        log::info!("fetched {id}: {} ({} x {})", ds.name, ds.n_instances(), ds.n_features());
    }
    Ok(())
}
