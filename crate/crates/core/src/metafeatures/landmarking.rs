//! Cheap learners whose cross-validated AUC characterizes a dataset.

use ndarray::{Array2, ArrayView2, Axis};
use rand::Rng as _;

use super::concept::sq_dist;
use super::{mean_filled, ExtractionConfig, Measures};
use crate::base_eval::{auc_multiclass, stratified_folds};
use crate::ingest::Dataset;
use crate::rng::{derive_seed, rng_from_seed};
use crate::tree::{Target, Tree, TreeParams};

const NAMES: [&str; 4] = ["one_nn", "naive_bayes", "best_node", "random_node"];

/// Per-fold AUC of 1-NN, Gaussian naive Bayes, the best single split and a
/// random split. Infeasible folds leave every landmarker empty (MISSING).
pub fn extract_landmarking(ds: &Dataset, cfg: &ExtractionConfig) -> Measures {
    let ds = mean_filled(ds);
    let mut per_fold: [Vec<f64>; 4] = Default::default();
    let c = ds.n_classes();
    let seed = derive_seed(cfg.seed, &[0x6c61_6e64]);
    let observed_classes = ds.class_counts().iter().filter(|n| **n > 0).count();
    let folds = if observed_classes < 2 {
        None
    } else {
        stratified_folds(&ds.labels, c, cfg.landmark_folds, seed).ok()
    };
    if let Some(folds) = folds {
        for fold in 0..cfg.landmark_folds {
            let (train, test): (Vec<usize>, Vec<usize>) = (0..ds.n_instances()).partition(|&i| folds[i] != fold);
            let xtr = ds.features.select(Axis(0), &train);
            let xte = ds.features.select(Axis(0), &test);
            let ytr: Vec<usize> = train.iter().map(|&i| ds.labels[i]).collect();
            let yte: Vec<usize> = test.iter().map(|&i| ds.labels[i]).collect();
            let fold_seed = derive_seed(seed, &[fold as u64]);
            let scores = [
                one_nn(xtr.view(), &ytr, c, xte.view()),
                naive_bayes(xtr.view(), &ytr, c, xte.view()),
                best_node(xtr.view(), &ytr, c, xte.view()),
                random_node(xtr.view(), &ytr, c, xte.view(), fold_seed),
            ];
            for (k, s) in scores.iter().enumerate() {
                if let Ok(auc) = auc_multiclass(s.view(), &yte) {
                    per_fold[k].push(auc);
                }
            }
        }
    }
    NAMES
        .iter()
        .zip(per_fold)
        .map(|(n, v)| (n.to_string(), v))
        .collect()
}

/// One-hot scores of the nearest training row, features min-max scaled with
/// training statistics. Ties go to the lowest training index.
pub(crate) fn one_nn(xtr: ArrayView2<f64>, ytr: &[usize], c: usize, xte: ArrayView2<f64>) -> Array2<f64> {
    let d = xtr.ncols();
    let (lo, range): (Vec<f64>, Vec<f64>) = (0..d)
        .map(|j| {
            let col = xtr.column(j);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi - lo)
        })
        .unzip();
    let scale = |row: ndarray::ArrayView1<f64>| -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, v)| if range[j] > 0.0 { (v - lo[j]) / range[j] } else { 0.0 })
            .collect()
    };
    let train: Vec<Vec<f64>> = xtr.rows().into_iter().map(scale).collect();
    let mut out = Array2::zeros((xte.nrows(), c));
    for (i, row) in xte.rows().into_iter().enumerate() {
        let q = scale(row);
        let mut best = (f64::INFINITY, 0);
        for (j, t) in train.iter().enumerate() {
            let dist = sq_dist(&q, t);
            if dist < best.0 {
                best = (dist, j);
            }
        }
        out[(i, ytr[best.1])] = 1.0;
    }
    out
}

/// Gaussian naive Bayes posteriors; variances are smoothed by `1e-9` times
/// the largest feature variance.
pub(crate) fn naive_bayes(xtr: ArrayView2<f64>, ytr: &[usize], c: usize, xte: ArrayView2<f64>) -> Array2<f64> {
    let (n, d) = xtr.dim();
    let max_var = (0..d)
        .map(|j| crate::stats::variance(&xtr.column(j).to_vec()))
        .fold(0.0, f64::max);
    let eps = if max_var > 0.0 { 1e-9 * max_var } else { 1e-9 };
    let mut counts = vec![0usize; c];
    for &l in ytr {
        counts[l] += 1;
    }
    let mut mean = Array2::<f64>::zeros((c, d));
    let mut var = Array2::<f64>::zeros((c, d));
    for (row, &l) in xtr.rows().into_iter().zip(ytr) {
        mean.row_mut(l).scaled_add(1.0, &row);
    }
    for k in 0..c {
        if counts[k] > 0 {
            mean.row_mut(k).mapv_inplace(|v| v / counts[k] as f64);
        }
    }
    for (row, &l) in xtr.rows().into_iter().zip(ytr) {
        for j in 0..d {
            let diff = row[j] - mean[(l, j)];
            var[(l, j)] += diff * diff;
        }
    }
    for k in 0..c {
        for j in 0..d {
            var[(k, j)] = var[(k, j)] / counts[k].max(1) as f64 + eps;
        }
    }
    let mut log_post = Array2::from_elem((xte.nrows(), c), f64::NEG_INFINITY);
    for (i, row) in xte.rows().into_iter().enumerate() {
        for k in 0..c {
            if counts[k] == 0 {
                continue;
            }
            let mut lp = (counts[k] as f64 / n as f64).ln();
            for j in 0..d {
                let v = var[(k, j)];
                let diff = row[j] - mean[(k, j)];
                lp -= 0.5 * ((2.0 * std::f64::consts::PI * v).ln() + diff * diff / v);
            }
            log_post[(i, k)] = lp;
        }
    }
    crate::base_eval::softmax_rows(log_post)
}

fn proportions(labels: impl Iterator<Item = usize>, c: usize) -> Vec<f64> {
    let mut counts = vec![0.0; c];
    let mut n = 0.0;
    for l in labels {
        counts[l] += 1.0;
        n += 1.0;
    }
    if n > 0.0 {
        counts.iter_mut().for_each(|v| *v /= n);
    }
    counts
}

fn leaf_scores(tree: &Tree, xte: ArrayView2<f64>, c: usize) -> Array2<f64> {
    let mut out = Array2::zeros((xte.nrows(), c));
    for (i, row) in xte.rows().into_iter().enumerate() {
        let p = tree.predict_row(row.as_slice().expect("standard layout"));
        out.row_mut(i).assign(&ndarray::ArrayView1::from(p));
    }
    out
}

/// Depth-one Gini tree over all attributes.
pub(crate) fn best_node(xtr: ArrayView2<f64>, ytr: &[usize], c: usize, xte: ArrayView2<f64>) -> Array2<f64> {
    let rows: Vec<usize> = (0..xtr.nrows()).collect();
    let params = TreeParams {
        max_depth: Some(1),
        ..TreeParams::default()
    };
    let tree = Tree::fit(
        xtr,
        Target::Classes { labels: ytr, n_classes: c },
        &rows,
        &params,
        &mut rng_from_seed(0),
    );
    leaf_scores(&tree, xte.as_standard_layout().view(), c)
}

/// Split on a random attribute at a threshold drawn uniformly from its
/// training range; each side scores by its training class proportions.
pub(crate) fn random_node(xtr: ArrayView2<f64>, ytr: &[usize], c: usize, xte: ArrayView2<f64>, seed: u64) -> Array2<f64> {
    let mut rng = rng_from_seed(seed);
    let j = rng.random_range(0..xtr.ncols());
    let col = xtr.column(j);
    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let u: f64 = rng.random();
    let t = lo + u * (hi - lo);
    let all = proportions(ytr.iter().copied(), c);
    let side = |left: bool| {
        let p = proportions(
            col.iter().zip(ytr).filter(|(v, _)| (**v <= t) == left).map(|(_, l)| *l),
            c,
        );
        if p.iter().sum::<f64>() > 0.0 {
            p
        } else {
            all.clone()
        }
    };
    let (left, right) = (side(true), side(false));
    let mut out = Array2::zeros((xte.nrows(), c));
    for (i, v) in xte.column(j).iter().enumerate() {
        let p = if *v <= t { &left } else { &right };
        out.row_mut(i).assign(&ndarray::ArrayView1::from(p.as_slice()));
    }
    out
}
