use serde::{Deserialize, Serialize};

use super::{MetaDatabase, Step};
use crate::stats::pearson_masked;
use crate::{is_missing, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PruneConfig {
    pub max_instance_missing: usize,
    pub max_feature_missing_frac: f64,
    pub correlation_threshold: f64,
    pub knn_k: usize,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            max_instance_missing: 100,
            max_feature_missing_frac: 0.7,
            correlation_threshold: 0.95,
            knn_k: 10,
        }
    }
}

/// Fixed order: rows with a missing target, rows with more than
/// `max_instance_missing` missing cells, columns with a missing fraction above
/// `max_feature_missing_frac`, then columns constant over their observed cells.
pub fn prune(db: &MetaDatabase, max_instance_missing: usize, max_feature_missing_frac: f64) -> Result<MetaDatabase> {
    let mut out = db.clone();

    let target_ok: Vec<bool> = out
        .y
        .rows()
        .into_iter()
        .map(|r| r.iter().all(|v| !is_missing(*v)))
        .collect();
    let dropped_missing_target_rows = names_where(&out.instance_names, &target_ok, false);
    out.keep_rows(&target_ok);

    let row_ok: Vec<bool> = out
        .x
        .rows()
        .into_iter()
        .map(|r| r.iter().filter(|v| is_missing(**v)).count() <= max_instance_missing)
        .collect();
    let dropped_rows = names_where(&out.instance_names, &row_ok, false);
    out.keep_rows(&row_ok);
    if out.n_rows() == 0 {
        return Err(Error::EmptyDatabase);
    }

    let n = out.n_rows() as f64;
    let col_ok: Vec<bool> = out
        .x
        .columns()
        .into_iter()
        .map(|c| (c.iter().filter(|v| is_missing(**v)).count() as f64 / n) <= max_feature_missing_frac)
        .collect();
    let dropped_missing_columns = names_where(&out.feature_names, &col_ok, false);
    out.keep_columns(&col_ok);

    let varies: Vec<bool> = out
        .x
        .columns()
        .into_iter()
        .map(|c| {
            let mut obs = c.iter().filter(|v| !is_missing(**v));
            match obs.next() {
                Some(first) => obs.any(|v| v != first),
                None => false,
            }
        })
        .collect();
    let dropped_constant_columns = names_where(&out.feature_names, &varies, false);
    out.keep_columns(&varies);
    if out.n_features() == 0 {
        return Err(Error::EmptyDatabase);
    }

    out.provenance.push(Step::Prune {
        max_instance_missing,
        max_feature_missing_frac,
        dropped_missing_target_rows,
        dropped_rows,
        dropped_missing_columns,
        dropped_constant_columns,
    });
    Ok(out)
}

fn names_where(names: &[String], flags: &[bool], value: bool) -> Vec<String> {
    names
        .iter()
        .zip(flags)
        .filter(|(_, f)| **f == value)
        .map(|(n, _)| n.clone())
        .collect()
}

/// Slack for `|r| >= threshold` so exact duplicates reach `|r| = 1` despite rounding.
const CORRELATION_SLACK: f64 = 1e-12;

/// Greedy scan in feature order: a feature is dropped when its |Pearson r|
/// with any already retained feature reaches `threshold`.
pub fn drop_correlated(db: &MetaDatabase, threshold: f64) -> Result<MetaDatabase> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::invalid(format!("correlation threshold {threshold} not in [0, 1]")));
    }
    let columns: Vec<Vec<f64>> = db.x.columns().into_iter().map(|c| c.to_vec()).collect();
    let mut retained: Vec<usize> = Vec::new();
    let mut keep = vec![false; columns.len()];
    for j in 0..columns.len() {
        let correlated = retained.iter().any(|&i| {
            let r = pearson_masked(&columns[i], &columns[j]);
            !is_missing(r) && r.abs() >= threshold - CORRELATION_SLACK
        });
        if !correlated {
            retained.push(j);
            keep[j] = true;
        }
    }
    let mut out = db.clone();
    let dropped = names_where(&out.feature_names, &keep, false);
    out.keep_columns(&keep);
    out.provenance.push(Step::DropCorrelated { threshold, dropped });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metadb::target_names;
    use crate::rng::rng_from_seed;
    use crate::MISSING;
    use ndarray::Array2;
    use rand::Rng;

    fn db(x: Array2<f64>) -> MetaDatabase {
        let n = x.nrows();
        MetaDatabase {
            instance_names: (0..n).map(|i| format!("d{i}")).collect(),
            feature_names: (0..x.ncols()).map(|j| format!("f{j}")).collect(),
            x,
            y: Array2::from_elem((n, 3), 0.5),
            target_names: target_names(),
            provenance: vec![],
        }
    }

    fn varied(n: usize, d: usize) -> Array2<f64> {
        Array2::from_shape_fn((n, d), |(i, j)| ((i * 31 + j * 17) % 23) as f64 + j as f64 * 0.1)
    }

    #[test]
    fn column_over_seventy_percent_missing() {
        let mut x = varied(100, 3);
        for i in 0..71 {
            x[(i, 1)] = MISSING;
        }
        for i in 0..70 {
            x[(i, 2)] = MISSING;
        }
        let out = prune(&db(x), 100, 0.7).unwrap();
        assert_eq!(out.feature_names, vec!["f0", "f2"]);
    }

    #[test]
    fn row_over_hundred_missing() {
        let mut x = varied(5, 120);
        for j in 0..101 {
            x[(1, j)] = MISSING;
        }
        for j in 0..100 {
            x[(2, j)] = MISSING;
        }
        let out = prune(&db(x), 100, 1.0).unwrap();
        assert_eq!(out.instance_names, vec!["d0", "d2", "d3", "d4"]);
    }

    #[test]
    fn constant_column_dropped() {
        let mut x = varied(10, 3);
        x.column_mut(1).fill(4.2);
        let out = prune(&db(x), 100, 0.7).unwrap();
        assert_eq!(out.feature_names, vec!["f0", "f2"]);
        let again = prune(&out, 100, 0.7).unwrap();
        assert_eq!(again.x, out.x);
        assert_eq!(again.feature_names, out.feature_names);
    }

    #[test]
    fn everything_pruned() {
        let x = Array2::from_elem((4, 2), 1.0);
        assert!(matches!(prune(&db(x), 100, 0.7), Err(Error::EmptyDatabase)));
    }

    #[test]
    fn duplicate_column_second_copy_dropped() {
        let mut x = varied(30, 3);
        let c0 = x.column(0).to_owned();
        x.column_mut(2).assign(&(c0 * 3.0 - 1.0));
        for t in [1.0, 0.95, 0.5] {
            let out = drop_correlated(&db(x.clone()), t).unwrap();
            assert!(out.feature_names.contains(&"f0".to_string()));
            assert!(!out.feature_names.contains(&"f2".to_string()), "threshold {t}");
        }
    }

    #[test]
    fn independent_columns_retained() {
        let mut rng = rng_from_seed(5);
        let x = Array2::from_shape_simple_fn((200, 8), || rng.random::<f64>());
        let out = drop_correlated(&db(x), 0.95).unwrap();
        assert_eq!(out.n_features(), 8);
    }

    #[test]
    fn threshold_one_only_exact_duplicates() {
        let mut x = varied(40, 3);
        let c0 = x.column(0).to_owned();
        let mut near = c0.clone();
        near[3] += 0.5;
        x.column_mut(1).assign(&near);
        x.column_mut(2).assign(&c0);
        let out = drop_correlated(&db(x), 1.0).unwrap();
        assert_eq!(out.feature_names, vec!["f0", "f1"]);
    }
}
