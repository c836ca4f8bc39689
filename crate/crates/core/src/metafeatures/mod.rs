//! Traditional meta-features: six measure families, each multi-valued measure
//! summarized by a fixed set of functions into one fixed-length vector.
//!
//! Column names are `measure.summary` (e.g. `skewness.mean`); scalars are
//! summarized too, so the schema depends only on the [`ExtractionConfig`].

mod concept;
mod general;
mod info_theoretic;
mod landmarking;
mod model_based;
mod statistical;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use concept::{extract_concept_complexity, nearest_neighbor, ComplexityInput};
pub use general::extract_general;
pub use info_theoretic::{discretize_equal_frequency, entropy_bits, extract_info_theoretic};
pub use landmarking::extract_landmarking;
pub use model_based::extract_model_based;
pub use statistical::extract_statistical;

use crate::ingest::{write_atomic, Dataset};
use crate::{is_missing, Error, Result, MISSING};

/// Raw measures before summarization: `(measure name, values)`.
pub type Measures = Vec<(String, Vec<f64>)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    General,
    Statistical,
    InfoTheoretic,
    Concept,
    ModelBased,
    Landmarking,
}

impl Family {
    /// Extraction order.
    pub const ALL: [Family; 6] = [
        Family::General,
        Family::Statistical,
        Family::InfoTheoretic,
        Family::Concept,
        Family::ModelBased,
        Family::Landmarking,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummaryFn {
    Min,
    Max,
    Mean,
}

impl SummaryFn {
    pub fn as_str(self) -> &'static str {
        match self {
            SummaryFn::Min => "min",
            SummaryFn::Max => "max",
            SummaryFn::Mean => "mean",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummarySpec {
    pub functions: Vec<SummaryFn>,
}

impl Default for SummarySpec {
    fn default() -> Self {
        SummarySpec {
            functions: vec![SummaryFn::Min, SummaryFn::Max, SummaryFn::Mean],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractionConfig {
    pub families: Vec<Family>,
    pub summary: SummarySpec,
    pub discretization_bins: usize,
    pub landmark_folds: usize,
    pub seed: u64,
    /// Concept measures are quadratic in the instance count; larger datasets
    /// are subsampled (seeded, stratified) to this many rows.
    pub complexity_max_instances: usize,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            families: Family::ALL.to_vec(),
            summary: SummarySpec::default(),
            discretization_bins: 10,
            landmark_folds: 10,
            seed: 0,
            complexity_max_instances: 2000,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return Err(Error::Config("at least one meta-feature family is required".into()));
        }
        if self.summary.functions.is_empty() {
            return Err(Error::Config("at least one summary function is required".into()));
        }
        if self.discretization_bins < 2 {
            return Err(Error::Config("discretization_bins must be at least 2".into()));
        }
        if self.landmark_folds < 2 {
            return Err(Error::Config("landmark_folds must be at least 2".into()));
        }
        if self.complexity_max_instances < 2 {
            return Err(Error::Config("complexity_max_instances must be at least 2".into()));
        }
        Ok(())
    }

    /// Families in extraction order, deduplicated.
    fn ordered_families(&self) -> Vec<Family> {
        Family::ALL.into_iter().filter(|f| self.families.contains(f)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaFeatureVector {
    pub dataset: String,
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

/// Applies each function over the observed entries; nothing observed gives
/// MISSING for every function.
pub fn summarize(values: &[f64], spec: &SummarySpec) -> Vec<f64> {
    let obs: Vec<f64> = values.iter().copied().filter(|v| !is_missing(*v)).collect();
    spec.functions
        .iter()
        .map(|f| {
            if obs.is_empty() {
                return MISSING;
            }
            match f {
                SummaryFn::Min => obs.iter().copied().fold(f64::INFINITY, f64::min),
                SummaryFn::Max => obs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                SummaryFn::Mean => obs.iter().sum::<f64>() / obs.len() as f64,
            }
        })
        .collect()
}

fn extract_family(ds: &Dataset, family: Family, cfg: &ExtractionConfig) -> Measures {
    match family {
        Family::General => extract_general(ds),
        Family::Statistical => extract_statistical(ds),
        Family::InfoTheoretic => extract_info_theoretic(ds, cfg.discretization_bins),
        Family::Concept => extract_concept_complexity(ds, cfg.complexity_max_instances, cfg.seed),
        Family::ModelBased => extract_model_based(ds),
        Family::Landmarking => extract_landmarking(ds, cfg),
    }
}

/// `f(D) = sigma(m(D))` over the configured families, in [`Family::ALL`] order.
pub fn extract_all(ds: &Dataset, cfg: &ExtractionConfig) -> Result<MetaFeatureVector> {
    cfg.validate()?;
    let mut names = Vec::new();
    let mut values = Vec::new();
    for family in cfg.ordered_families() {
        for (measure, raw) in extract_family(ds, family, cfg) {
            let summary = summarize(&raw, &cfg.summary);
            for (f, v) in cfg.summary.functions.iter().zip(summary) {
                names.push(format!("{measure}.{}", f.as_str()));
                values.push(v);
            }
        }
    }
    Ok(MetaFeatureVector {
        dataset: ds.name.clone(),
        names,
        values,
    })
}

/// Extracts every dataset in parallel; output order follows input order.
pub fn extract_batch(datasets: &[Dataset], cfg: &ExtractionConfig) -> Result<Vec<MetaFeatureVector>> {
    datasets.par_iter().map(|ds| extract_all(ds, cfg)).collect()
}

/// One row per dataset: `dataset, <names...>`, MISSING as an empty cell.
pub fn write_batch_csv(vectors: &[MetaFeatureVector], path: &Path) -> Result<()> {
    let Some(first) = vectors.first() else {
        return Err(Error::EmptyData);
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(std::iter::once("dataset").chain(first.names.iter().map(String::as_str)))?;
    for v in vectors {
        if v.names != first.names {
            return Err(Error::invalid(format!("schema of `{}` differs from `{}`", v.dataset, first.dataset)));
        }
        let cells = v
            .values
            .iter()
            .map(|x| if is_missing(*x) { String::new() } else { format!("{x:?}") });
        w.write_record(std::iter::once(v.dataset.clone()).chain(cells))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    write_atomic(path, &bytes)
}

pub fn read_batch_csv(path: &Path) -> Result<Vec<MetaFeatureVector>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::invalid(format!("{other:?}")),
    })?;
    let names: Vec<String> = r.headers()?.iter().skip(1).map(str::to_string).collect();
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let values = rec
            .iter()
            .skip(1)
            .map(|c| {
                if c.is_empty() {
                    Ok(MISSING)
                } else {
                    c.parse::<f64>().map_err(|_| Error::Parse {
                        line: i + 2,
                        message: format!("`{c}` is not a number"),
                    })
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != names.len() {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: names.len() + 1,
                found: rec.len(),
            });
        }
        out.push(MetaFeatureVector {
            dataset: rec[0].to_string(),
            names: names.clone(),
            values,
        });
    }
    Ok(out)
}

/// Column-mean filled copy for model-based measures; complete datasets are
/// returned unchanged.
pub(crate) fn mean_filled(ds: &Dataset) -> std::borrow::Cow<'_, Dataset> {
    if !ds.has_missing() {
        return std::borrow::Cow::Borrowed(ds);
    }
    let mut out = ds.clone();
    for mut col in out.features.columns_mut() {
        let obs: Vec<f64> = col.iter().copied().filter(|v| !is_missing(*v)).collect();
        let fill = if obs.is_empty() { 0.0 } else { obs.iter().sum::<f64>() / obs.len() as f64 };
        col.mapv_inplace(|v| if is_missing(v) { fill } else { v });
    }
    std::borrow::Cow::Owned(out)
}

/// Single-valued measure.
pub(crate) fn scalar(name: &str, v: f64) -> (String, Vec<f64>) {
    (name.to_string(), vec![v])
}
