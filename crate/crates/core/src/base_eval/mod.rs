//! Meta-targets: cross-validated AUC of three base classifiers per dataset.

mod auc;
mod folds;
mod learners;
mod targets_io;

use ndarray::{Array2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use auc::{auc_binary, auc_multiclass};
pub use folds::stratified_folds;
pub use learners::{fit_predict_proba, MlpClassifier, RandomForestClassifier, SvmClassifier};
pub use targets_io::{read_targets, write_targets};

use crate::ingest::Dataset;
use crate::metadb::Scaler;
use crate::rng::derive_seed;
use crate::{is_missing, Error, Result, MISSING};

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseLearnerKind {
    Svm,
    Rf,
    Mlp,
}

impl BaseLearnerKind {
    pub const ALL: [BaseLearnerKind; 3] = [BaseLearnerKind::Svm, BaseLearnerKind::Rf, BaseLearnerKind::Mlp];

    pub fn as_str(self) -> &'static str {
        match self {
            BaseLearnerKind::Svm => "svm",
            BaseLearnerKind::Rf => "rf",
            BaseLearnerKind::Mlp => "mlp",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::str::FromStr for BaseLearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseLearnerKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown base learner `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LearnerStatus {
    Ok,
    Failed(String),
}

/// AUC per base learner in [`BaseLearnerKind::ALL`] order; a slot holds a
/// value exactly when its status is `Ok`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRecord {
    pub dataset_name: String,
    pub auc: [f64; 3],
    pub status: [LearnerStatus; 3],
}

impl PerformanceRecord {
    pub fn auc(&self, kind: BaseLearnerKind) -> Option<f64> {
        match self.status[kind.index()] {
            LearnerStatus::Ok => Some(self.auc[kind.index()]),
            LearnerStatus::Failed(_) => None,
        }
    }
}

/// Mean AUC over a stratified `folds`-fold CV. Features are standardized with
/// the training split's statistics in every fold.
pub fn evaluate_base(ds: &Dataset, kind: BaseLearnerKind, folds: usize, seed: u64) -> Result<f64> {
    if ds.features.iter().any(|v| is_missing(*v)) {
        return Err(Error::invalid(format!("dataset `{}` has missing values", ds.name)));
    }
    let assignment = stratified_folds(&ds.labels, ds.n_classes(), folds, seed)?;
    let n_classes = ds.n_classes();
    let mut total = 0.0;
    for fold in 0..folds {
        let (train, test): (Vec<usize>, Vec<usize>) = (0..ds.n_instances()).partition(|&i| assignment[i] != fold);
        let x_train = ds.features.select(Axis(0), &train);
        let x_test = ds.features.select(Axis(0), &test);
        let scaler = Scaler::fit(x_train.view());
        let y_train: Vec<usize> = train.iter().map(|&i| ds.labels[i]).collect();
        let y_test: Vec<usize> = test.iter().map(|&i| ds.labels[i]).collect();
        let scores = fit_predict_proba(
            kind,
            &scaler.transform(x_train.view()),
            &y_train,
            n_classes,
            &scaler.transform(x_test.view()),
            derive_seed(seed, &[fold as u64]),
        )?;
        total += auc_multiclass(scores.view(), &y_test)?;
    }
    Ok(total / folds as f64)
}

/// One record per dataset, in input order. Failures are recorded per slot.
pub fn build_targets(datasets: &[Dataset], folds: usize, seed: u64) -> Vec<PerformanceRecord> {
    datasets
        .par_iter()
        .map(|ds| {
            let mut auc = [MISSING; 3];
            let mut status = [LearnerStatus::Ok, LearnerStatus::Ok, LearnerStatus::Ok];
            for kind in BaseLearnerKind::ALL {
                let k = kind.index();
                match evaluate_base(ds, kind, folds, derive_seed(seed, &[k as u64])) {
                    Ok(v) => auc[k] = v,
                    Err(e) => {
                        log::warn!("{} on `{}` failed: {e}", kind.as_str(), ds.name);
                        status[k] = LearnerStatus::Failed(e.to_string());
                    }
                }
            }
            PerformanceRecord {
                dataset_name: ds.name.clone(),
                auc,
                status,
            }
        })
        .collect()
}

/// Softmax over each row, stabilized by the row maximum.
pub(crate) fn softmax_rows(mut z: Array2<f64>) -> Array2<f64> {
    for mut row in z.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row /= sum;
    }
    z
}
