//! Class-overlap and boundary-complexity measures.
//!
//! Distances are Euclidean on min-max scaled features. Nearest-neighbor ties
//! go to the lowest instance index; the minimum spanning tree is grown by
//! Prim's algorithm from instance 0 with edge ties broken by
//! `(min index, max index)`.

use rand::seq::index::sample;

use super::{scalar, Measures};
use crate::ingest::Dataset;
use crate::rng::{derive_seed, rng_from_seed};
use crate::MISSING;

/// Min-max scaled rows plus labels, after optional subsampling.
#[derive(Debug, Clone)]
pub struct ComplexityInput {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl ComplexityInput {
    /// `None` when the dataset has missing cells. Datasets larger than
    /// `max_instances` are reduced to a seeded uniform subsample (original order kept).
    pub fn new(ds: &Dataset, max_instances: usize, seed: u64) -> Option<ComplexityInput> {
        if ds.has_missing() {
            return None;
        }
        let n = ds.n_instances();
        let keep: Vec<usize> = if n > max_instances {
            let mut rng = rng_from_seed(derive_seed(seed, &[0x636f_6e63]));
            let mut idx = sample(&mut rng, n, max_instances).into_vec();
            idx.sort_unstable();
            idx
        } else {
            (0..n).collect()
        };
        let d = ds.n_features();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for &i in &keep {
            for j in 0..d {
                let v = ds.features[(i, j)];
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        let rows = keep
            .iter()
            .map(|&i| {
                (0..d)
                    .map(|j| {
                        let range = hi[j] - lo[j];
                        if range > 0.0 {
                            (ds.features[(i, j)] - lo[j]) / range
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Some(ComplexityInput {
            rows,
            labels: keep.iter().map(|&i| ds.labels[i]).collect(),
        })
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest other row to `i` (ties: lowest index).
pub fn nearest_neighbor(rows: &[Vec<f64>], i: usize) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (j, r) in rows.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = sq_dist(&rows[i], r);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, j));
        }
    }
    best.map(|(_, j)| j)
}

/// Max over attributes of `sum_c n_c (mu_c - mu)^2 / sum_c n_c var_c`.
/// Attributes with zero between- and within-class spread are skipped; zero
/// within-class spread with positive separation has no finite ratio and
/// yields MISSING.
pub(crate) fn fisher_f1(ds: &Dataset) -> f64 {
    let c = ds.n_classes();
    let counts = ds.class_counts();
    let mut best: Option<f64> = None;
    for j in 0..ds.n_features() {
        let col = ds.features.column(j);
        let mu = col.sum() / col.len() as f64;
        let mut sums = vec![0.0; c];
        for (v, &l) in col.iter().zip(&ds.labels) {
            sums[l] += v;
        }
        let means: Vec<f64> = (0..c)
            .map(|k| if counts[k] > 0 { sums[k] / counts[k] as f64 } else { 0.0 })
            .collect();
        let mut within = 0.0;
        for (v, &l) in col.iter().zip(&ds.labels) {
            within += (v - means[l]) * (v - means[l]);
        }
        let between: f64 = (0..c).map(|k| counts[k] as f64 * (means[k] - mu) * (means[k] - mu)).sum();
        if within > 0.0 {
            let r = between / within;
            best = Some(best.map_or(r, |b| b.max(r)));
        } else if between > 0.0 {
            return MISSING;
        }
    }
    best.unwrap_or(MISSING)
}

/// Fraction of instances incident to a minimum-spanning-tree edge joining two classes.
pub(crate) fn n1(input: &ComplexityInput) -> f64 {
    let rows = &input.rows;
    let n = rows.len();
    if n < 2 {
        return MISSING;
    }
    let mut in_tree = vec![false; n];
    let mut key = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut on_boundary = vec![false; n];
    let edge_key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..n {
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let d = sq_dist(&rows[current], &rows[v]);
            if d < key[v] || (d == key[v] && edge_key(current, v) < edge_key(parent[v], v)) {
                key[v] = d;
                parent[v] = current;
            }
        }
        let mut next = usize::MAX;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let better = next == usize::MAX
                || key[v] < key[next]
                || (key[v] == key[next] && edge_key(parent[v], v) < edge_key(parent[next], next));
            if better {
                next = v;
            }
        }
        in_tree[next] = true;
        let p = parent[next];
        if input.labels[p] != input.labels[next] {
            on_boundary[p] = true;
            on_boundary[next] = true;
        }
        current = next;
    }
    on_boundary.iter().filter(|b| **b).count() as f64 / n as f64
}

/// `(n2, per-instance LOO 1-NN error indicators)` from one quadratic pass.
fn neighbor_measures(input: &ComplexityInput) -> (f64, Vec<f64>) {
    let rows = &input.rows;
    let n = rows.len();
    let mut intra_sum = 0.0;
    let mut inter_sum = 0.0;
    let mut errors = Vec::with_capacity(n);
    for i in 0..n {
        let mut nearest: Option<(f64, usize)> = None;
        let mut same = f64::INFINITY;
        let mut other = f64::INFINITY;
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = sq_dist(&rows[i], &rows[j]);
            if nearest.is_none_or(|(bd, _)| d < bd) {
                nearest = Some((d, j));
            }
            if input.labels[j] == input.labels[i] {
                same = same.min(d);
            } else {
                other = other.min(d);
            }
        }
        if let Some((_, j)) = nearest {
            errors.push(f64::from(u8::from(input.labels[j] != input.labels[i])));
        }
        if same.is_finite() && other.is_finite() {
            intra_sum += same.sqrt();
            inter_sum += other.sqrt();
        }
    }
    let n2 = if inter_sum > 0.0 { intra_sum / inter_sum } else { MISSING };
    (n2, errors)
}

/// `f1`, `n1`, `n2`, `n3` and per-instance `concept_variation`.
pub fn extract_concept_complexity(ds: &Dataset, max_instances: usize, seed: u64) -> Measures {
    let observed_classes = ds.class_counts().iter().filter(|c| **c > 0).count();
    let input = if observed_classes < 2 {
        None
    } else {
        ComplexityInput::new(ds, max_instances, seed)
    };
    let Some(input) = input else {
        return vec![
            scalar("f1", MISSING),
            scalar("n1", MISSING),
            scalar("n2", MISSING),
            scalar("n3", MISSING),
            ("concept_variation".into(), Vec::new()),
        ];
    };
    let (n2, errors) = neighbor_measures(&input);
    let n3 = if errors.is_empty() {
        MISSING
    } else {
        errors.iter().sum::<f64>() / errors.len() as f64
    };
    vec![
        scalar("f1", if ds.has_missing() { MISSING } else { fisher_f1(ds) }),
        scalar("n1", n1(&input)),
        scalar("n2", n2),
        scalar("n3", n3),
        ("concept_variation".into(), errors),
    ]
}
