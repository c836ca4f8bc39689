//! Loading, validating and encoding classification datasets.

mod arff;
mod csv_io;
pub mod openml;
mod validate;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

pub use arff::{load_arff, load_arff_with_target, parse_arff};
pub use csv_io::{load_csv, load_csv_with, write_csv, CsvOptions, DEFAULT_NA_TOKENS};
pub use openml::{fetch_openml, OpenMlClient};
pub(crate) use openml::write_atomic;
pub use validate::{validate, DatasetCriteria, RuleId, ValidationReport, Violation};

use crate::{is_missing, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    /// Integer-coded column; `levels[code]` is the original value.
    Categorical { levels: Vec<String> },
}

impl ColumnKind {
    pub fn is_categorical(&self) -> bool {
        matches!(self, ColumnKind::Categorical { .. })
    }
}

/// One classification task.
///
/// `features` is `n x d`; categorical cells hold their integer code as `f64` and
/// missing cells hold [`crate::MISSING`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub column_names: Vec<String>,
    pub column_kinds: Vec<ColumnKind>,
    pub features: Array2<f64>,
    pub target_name: String,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset and checks the structural invariants.
    pub fn new(
        name: impl Into<String>,
        column_names: Vec<String>,
        column_kinds: Vec<ColumnKind>,
        features: Array2<f64>,
        target_name: impl Into<String>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let ds = Dataset {
            name: name.into(),
            column_names,
            column_kinds,
            features,
            target_name: target_name.into(),
            labels,
            class_names,
        };
        ds.check()?;
        Ok(ds)
    }

    /// Numeric-only dataset with generated column names; handy for synthetic data.
    pub fn from_numeric(name: &str, features: Array2<f64>, labels: Vec<usize>) -> Result<Self> {
        let d = features.ncols();
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        Dataset::new(
            name,
            (0..d).map(|j| format!("x{j}")).collect(),
            vec![ColumnKind::Numeric; d],
            features,
            "class",
            labels,
            (0..n_classes).map(|c| c.to_string()).collect(),
        )
    }

    fn check(&self) -> Result<()> {
        let (n, d) = self.features.dim();
        if n == 0 {
            return Err(Error::EmptyData);
        }
        if d == 0 {
            return Err(Error::invalid("dataset has no feature columns"));
        }
        if self.column_names.len() != d || self.column_kinds.len() != d {
            return Err(Error::Shape(format!(
                "{} names / {} kinds for {d} columns",
                self.column_names.len(),
                self.column_kinds.len()
            )));
        }
        if self.labels.len() != n {
            return Err(Error::Shape(format!("{} labels for {n} rows", self.labels.len())));
        }
        let c = self.class_names.len();
        let mut seen = vec![false; c];
        for &l in &self.labels {
            if l >= c {
                return Err(Error::invalid(format!("label {l} out of range for {c} classes")));
            }
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!(
                "class `{}` has no instances",
                self.class_names[missing]
            )));
        }
        for (j, kind) in self.column_kinds.iter().enumerate() {
            if let ColumnKind::Categorical { levels } = kind {
                for &v in self.features.column(j) {
                    if !is_missing(v) && (v < 0.0 || v.fract() != 0.0 || v as usize >= levels.len()) {
                        return Err(Error::invalid(format!(
                            "column `{}` holds invalid category code {v}",
                            self.column_names[j]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_instances(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    pub fn has_missing(&self) -> bool {
        self.features.iter().any(|v| is_missing(*v))
    }

    pub fn n_categorical(&self) -> usize {
        self.column_kinds.iter().filter(|k| k.is_categorical()).count()
    }

    /// Subset of rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let features = self.features.select(ndarray::Axis(0), rows);
        Dataset {
            name: self.name.clone(),
            column_names: self.column_names.clone(),
            column_kinds: self.column_kinds.clone(),
            features,
            target_name: self.target_name.clone(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            class_names: self.class_names.clone(),
        }
    }
}

/// Numeric view of a dataset.
///
/// Categorical codes are already stored as reals, so this is a value-preserving
/// copy; `column_kinds` are kept so meta-features can still count categorical
/// attributes.
pub fn encode_for_numeric(ds: &Dataset) -> Dataset {
    ds.clone()
}
