use super::{MetaDatabase, Step};
use crate::{is_missing, Error, Result};

/// Masked distance between two min-max normalized rows: Euclidean over
/// mutually observed columns, rescaled by `sqrt(d / observed)`. `None` when
/// no column is observed in both.
pub(crate) fn masked_distance(a: &[f64], b: &[f64]) -> Option<f64> {
    let d = a.len();
    let mut sum = 0.0;
    let mut count = 0usize;
    for j in 0..d {
        if !is_missing(a[j]) && !is_missing(b[j]) {
            let diff = a[j] - b[j];
            sum += diff * diff;
            count += 1;
        }
    }
    (count > 0).then(|| (sum * d as f64 / count as f64).sqrt())
}

/// k-NN imputation against the immutable pre-imputation matrix.
///
/// For each missing cell `(i, j)` the `k` rows nearest to row `i` (ties by
/// lowest index) are found; the cell becomes the mean of those neighbors that
/// observe column `j`, or the column mean when none does.
pub fn impute_knn(db: &MetaDatabase, k: usize) -> Result<MetaDatabase> {
    let (n, d) = db.x.dim();
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut out = db.clone();
    let missing_cells = db.x.iter().filter(|v| is_missing(**v)).count();
    if missing_cells == 0 {
        out.provenance.push(Step::ImputeKnn { k, imputed_cells: 0 });
        return Ok(out);
    }
    if n < k + 1 {
        return Err(Error::invalid(format!("k-NN imputation with k={k} needs at least {} rows, got {n}", k + 1)));
    }
    let mut normalized = db.x.clone();
    let mut col_means = vec![0.0; d];
    for j in 0..d {
        let obs: Vec<f64> = db.x.column(j).iter().copied().filter(|v| !is_missing(*v)).collect();
        if obs.is_empty() {
            return Err(Error::invalid(format!(
                "column `{}` has no observed values",
                db.feature_names[j]
            )));
        }
        col_means[j] = obs.iter().sum::<f64>() / obs.len() as f64;
        let lo = obs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = obs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let range = hi - lo;
        normalized.column_mut(j).mapv_inplace(|v| {
            if is_missing(v) {
                v
            } else if range > 0.0 {
                (v - lo) / range
            } else {
                0.0
            }
        });
    }
    for i in 0..n {
        if normalized.row(i).iter().all(|v| is_missing(*v)) {
            return Err(Error::invalid(format!("row `{}` has no observed values", db.instance_names[i])));
        }
    }
    let rows: Vec<Vec<f64>> = normalized.rows().into_iter().map(|r| r.to_vec()).collect();
    for i in 0..n {
        let missing: Vec<usize> = (0..d).filter(|&j| is_missing(db.x[(i, j)])).collect();
        if missing.is_empty() {
            continue;
        }
        let mut candidates: Vec<(f64, usize)> = (0..n)
            .filter(|&r| r != i)
            .filter_map(|r| masked_distance(&rows[i], &rows[r]).map(|dist| (dist, r)))
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        candidates.truncate(k);
        for j in missing {
            let (sum, count) = candidates
                .iter()
                .map(|&(_, r)| db.x[(r, j)])
                .filter(|v| !is_missing(*v))
                .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
            out.x[(i, j)] = if count > 0 { sum / count as f64 } else { col_means[j] };
        }
    }
    out.provenance.push(Step::ImputeKnn {
        k,
        imputed_cells: missing_cells,
    });
    Ok(out)
}
