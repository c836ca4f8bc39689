//! The meta-database: one row per dataset, traditional meta-features as
//! columns and one AUC target per base learner.
//!
//! Preprocessing runs `prune -> drop_correlated -> impute_knn`; every step
//! appends a [`Step`] with its parameters so [`replay`] can rebuild the
//! processed database from the raw one.

mod impute;
mod io;
mod prune;
mod scaler;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

pub use impute::impute_knn;
pub use io::{read_csv, read_provenance, write_csv, write_provenance};
pub use prune::{drop_correlated, prune, PruneConfig};
pub use scaler::{apply_scaler, fit_scaler, Scaler};

use crate::base_eval::{BaseLearnerKind, PerformanceRecord};
use crate::metafeatures::MetaFeatureVector;
use crate::{is_missing, Error, Result, MISSING};

pub fn target_names() -> Vec<String> {
    BaseLearnerKind::ALL
        .iter()
        .map(|k| format!("auc_{}", k.as_str()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    Assemble {
        rows_in: usize,
        dropped_all_failed: Vec<String>,
    },
    Prune {
        max_instance_missing: usize,
        max_feature_missing_frac: f64,
        dropped_missing_target_rows: Vec<String>,
        dropped_rows: Vec<String>,
        dropped_missing_columns: Vec<String>,
        dropped_constant_columns: Vec<String>,
    },
    DropCorrelated {
        threshold: f64,
        dropped: Vec<String>,
    },
    ImputeKnn {
        k: usize,
        imputed_cells: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaDatabase {
    pub instance_names: Vec<String>,
    pub feature_names: Vec<String>,
    /// `n_meta x n_features`, [`MISSING`] allowed before imputation.
    pub x: Array2<f64>,
    /// `n_meta x 3` AUC targets in [`BaseLearnerKind::ALL`] order.
    pub y: Array2<f64>,
    pub target_names: Vec<String>,
    pub provenance: Vec<Step>,
}

impl MetaDatabase {
    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn check(&self) -> Result<()> {
        let (n, d) = self.x.dim();
        if self.instance_names.len() != n || self.y.nrows() != n {
            return Err(Error::Shape(format!(
                "{} names / {} target rows for {n} feature rows",
                self.instance_names.len(),
                self.y.nrows()
            )));
        }
        if self.feature_names.len() != d || self.y.ncols() != self.target_names.len() {
            return Err(Error::Shape("feature or target names do not match matrix width".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for f in &self.feature_names {
            if !seen.insert(f) {
                return Err(Error::invalid(format!("duplicate feature name `{f}`")));
            }
        }
        Ok(())
    }

    pub fn has_missing(&self) -> bool {
        self.x.iter().any(|v| is_missing(*v))
    }

    pub fn select_rows(&self, rows: &[usize]) -> MetaDatabase {
        MetaDatabase {
            instance_names: rows.iter().map(|&r| self.instance_names[r].clone()).collect(),
            feature_names: self.feature_names.clone(),
            x: self.x.select(Axis(0), rows),
            y: self.y.select(Axis(0), rows),
            target_names: self.target_names.clone(),
            provenance: self.provenance.clone(),
        }
    }

    pub(crate) fn keep_rows(&mut self, keep: &[bool]) {
        let rows: Vec<usize> = (0..self.n_rows()).filter(|&i| keep[i]).collect();
        self.x = self.x.select(Axis(0), &rows);
        self.y = self.y.select(Axis(0), &rows);
        self.instance_names = rows.iter().map(|&r| self.instance_names[r].clone()).collect();
    }

    pub(crate) fn keep_columns(&mut self, keep: &[bool]) {
        let cols: Vec<usize> = (0..self.n_features()).filter(|&j| keep[j]).collect();
        self.x = self.x.select(Axis(1), &cols);
        self.feature_names = cols.iter().map(|&j| self.feature_names[j].clone()).collect();
    }
}

/// Stacks meta-feature vectors and performance records (same datasets, same order).
///
/// Rows whose three targets all failed are dropped.
pub fn assemble(vectors: &[MetaFeatureVector], targets: &[PerformanceRecord]) -> Result<MetaDatabase> {
    if vectors.len() != targets.len() {
        return Err(Error::Shape(format!(
            "{} meta-feature vectors vs {} performance records",
            vectors.len(),
            targets.len()
        )));
    }
    if vectors.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    for (i, (v, t)) in vectors.iter().zip(targets).enumerate() {
        if v.dataset != t.dataset_name {
            return Err(Error::NameMismatch {
                index: i,
                left: v.dataset.clone(),
                right: t.dataset_name.clone(),
            });
        }
        if v.names != vectors[0].names {
            return Err(Error::invalid(format!(
                "meta-feature schema of `{}` differs from `{}`",
                v.dataset, vectors[0].dataset
            )));
        }
    }
    let d = vectors[0].names.len();
    let kept: Vec<usize> = (0..vectors.len())
        .filter(|&i| BaseLearnerKind::ALL.iter().any(|k| targets[i].auc(*k).is_some()))
        .collect();
    let dropped: Vec<String> = (0..vectors.len())
        .filter(|i| !kept.contains(i))
        .map(|i| vectors[i].dataset.clone())
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    let mut x = Array2::from_elem((kept.len(), d), MISSING);
    let mut y = Array2::from_elem((kept.len(), 3), MISSING);
    for (r, &i) in kept.iter().enumerate() {
        for (j, v) in vectors[i].values.iter().enumerate() {
            x[(r, j)] = *v;
        }
        for (k, kind) in BaseLearnerKind::ALL.iter().enumerate() {
            y[(r, k)] = targets[i].auc(*kind).unwrap_or(MISSING);
        }
    }
    let db = MetaDatabase {
        instance_names: kept.iter().map(|&i| vectors[i].dataset.clone()).collect(),
        feature_names: vectors[0].names.clone(),
        x,
        y,
        target_names: target_names(),
        provenance: vec![Step::Assemble {
            rows_in: vectors.len(),
            dropped_all_failed: dropped,
        }],
    };
    db.check()?;
    Ok(db)
}

/// `prune -> drop_correlated -> impute_knn` with the given parameters.
pub fn preprocess(db: &MetaDatabase, prune_cfg: &PruneConfig) -> Result<MetaDatabase> {
    let pruned = prune(db, prune_cfg.max_instance_missing, prune_cfg.max_feature_missing_frac)?;
    let decorrelated = drop_correlated(&pruned, prune_cfg.correlation_threshold)?;
    impute_knn(&decorrelated, prune_cfg.knn_k)
}

/// Re-applies the recorded preprocessing steps (everything after `Assemble`) to `raw`.
pub fn replay(raw: &MetaDatabase, steps: &[Step]) -> Result<MetaDatabase> {
    let mut db = raw.clone();
    for step in steps {
        db = match step {
            Step::Assemble { .. } => continue,
            Step::Prune {
                max_instance_missing,
                max_feature_missing_frac,
                ..
            } => prune(&db, *max_instance_missing, *max_feature_missing_frac)?,
            Step::DropCorrelated { threshold, .. } => drop_correlated(&db, *threshold)?,
            Step::ImputeKnn { k, .. } => impute_knn(&db, *k)?,
        };
    }
    Ok(db)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::base_eval::LearnerStatus;

    pub fn vector(name: &str, values: Vec<f64>) -> MetaFeatureVector {
        MetaFeatureVector {
            dataset: name.into(),
            names: (0..values.len()).map(|j| format!("m{j}")).collect(),
            values,
        }
    }

    pub fn record(name: &str, aucs: [Option<f64>; 3]) -> PerformanceRecord {
        PerformanceRecord {
            dataset_name: name.into(),
            auc: aucs.map(|a| a.unwrap_or(MISSING)),
            status: aucs.map(|a| match a {
                Some(_) => LearnerStatus::Ok,
                None => LearnerStatus::Failed("test".into()),
            }),
        }
    }
}
