//! Pipeline configuration: a TOML document with one section per stage.
//!
//! Precedence is built-in defaults, then the config file, then `--set
//! section.key=value` overrides, then dedicated flags (`--seed`, `--out`,
//! `--plan.repeats`, ...).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::abstractnet::NetConfig;
use crate::evaluation::{CvPlan, ExperimentConfig, DEFAULT_ROPE};
use crate::ingest::DatasetCriteria;
use crate::metadb::PruneConfig;
use crate::metafeatures::ExtractionConfig;
use crate::metamodels::{FeatureSetting, RegressorKind, RegressorParams};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sources {
    /// Local `.csv` or `.arff` files.
    pub paths: Vec<PathBuf>,
    pub openml_ids: Vec<u64>,
    /// Target column for CSV files (ARFF falls back to its own default).
    pub target: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpenMlSection {
    pub endpoint: String,
    pub cache_dir: PathBuf,
}

impl Default for OpenMlSection {
    fn default() -> Self {
        OpenMlSection {
            endpoint: crate::ingest::openml::DEFAULT_ENDPOINT.to_string(),
            cache_dir: PathBuf::from("cache"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaseEvalSection {
    pub folds: usize,
    pub seed: u64,
}

impl Default for BaseEvalSection {
    fn default() -> Self {
        BaseEvalSection {
            folds: crate::base_eval::DEFAULT_FOLDS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationSection {
    pub settings: Vec<FeatureSetting>,
    pub inducers: Vec<RegressorKind>,
    pub pca_variance: f64,
    pub rope: f64,
    /// Defaults to `1 / plan.folds`.
    pub rho: Option<f64>,
    pub top_k: usize,
}

impl Default for EvaluationSection {
    fn default() -> Self {
        EvaluationSection {
            settings: FeatureSetting::ALL.to_vec(),
            inducers: RegressorKind::ALL.to_vec(),
            pca_variance: 0.95,
            rope: DEFAULT_ROPE,
            rho: None,
            top_k: 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub out: PathBuf,
    pub jobs: Option<usize>,
    pub sources: Sources,
    pub openml: OpenMlSection,
    pub criteria: DatasetCriteria,
    pub extraction: ExtractionConfig,
    pub base_eval: BaseEvalSection,
    pub preprocess: PruneConfig,
    pub network: NetConfig,
    pub metamodels: RegressorParams,
    pub plan: CvPlan,
    pub evaluation: EvaluationSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            out: PathBuf::from("out"),
            jobs: None,
            sources: Sources::default(),
            openml: OpenMlSection::default(),
            criteria: DatasetCriteria::default(),
            extraction: ExtractionConfig::default(),
            base_eval: BaseEvalSection::default(),
            preprocess: PruneConfig::default(),
            network: NetConfig::default(),
            metamodels: RegressorParams::default(),
            plan: CvPlan::default(),
            evaluation: EvaluationSection::default(),
        }
    }
}

impl PipelineConfig {
    /// Loads `path` (if any) and applies `key=value` overrides, where keys are
    /// dotted paths (`plan.repeats=2`) and values are TOML literals; bare
    /// words are taken as strings.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<PipelineConfig> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                text.parse::<toml::Table>()
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: PipelineConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.extraction.validate()?;
        self.network.validate()?;
        self.experiment().validate()?;
        if self.base_eval.folds < 2 {
            return Err(Error::Config("base_eval.folds must be at least 2".into()));
        }
        if self.evaluation.rho.is_some_and(|r| !(0.0..1.0).contains(&r)) {
            return Err(Error::Config("evaluation.rho must be in [0, 1)".into()));
        }
        if !(self.evaluation.rope >= 0.0) {
            return Err(Error::Config("evaluation.rope must be non-negative".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }

    /// Sets every seed in the pipeline.
    pub fn set_seed(&mut self, seed: u64) {
        self.extraction.seed = seed;
        self.base_eval.seed = seed;
        self.plan.master_seed = seed;
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            plan: self.plan.clone(),
            net: self.network.clone(),
            regressors: self.metamodels.clone(),
            settings: self.evaluation.settings.clone(),
            inducers: self.evaluation.inducers.clone(),
            pca_variance: self.evaluation.pca_variance,
        }
    }

    pub fn rho(&self) -> f64 {
        self.evaluation.rho.unwrap_or(1.0 / self.plan.folds as f64)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }
}

pub(crate) fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = parse_value(raw);
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|k| !k.is_empty()).ok_or_else(|| Error::Config(format!("empty key in `{assignment}`")))?;
    let mut node = table;
    for part in parts {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{part}` in `{key}` is not a section")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
