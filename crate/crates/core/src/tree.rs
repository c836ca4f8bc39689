//! CART trees shared by the classification and regression learners.
//!
//! Splits are axis-aligned `x[f] <= t` with `t` the midpoint between
//! consecutive distinct values. Candidate features are scanned in ascending
//! index order and a candidate replaces the incumbent only on a strictly better
//! score, so ties go to the lowest feature index and then the lowest threshold.
//! Impure nodes are split even when the best split does not lower impurity
//! (XOR-like data still grows).

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    Sqrt,
    /// `max(1, floor(d / 3))`
    Third,
    Fixed(usize),
}

impl MaxFeatures {
    pub fn resolve(self, d: usize) -> usize {
        let m = match self {
            MaxFeatures::All => d,
            MaxFeatures::Sqrt => (d as f64).sqrt().floor() as usize,
            MaxFeatures::Third => d / 3,
            MaxFeatures::Fixed(m) => m,
        };
        m.clamp(1, d.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::All,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Classes { labels: &'a [usize], n_classes: usize },
    Values(&'a [f64]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeKind {
    Leaf,
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub kind: NodeKind,
    pub n_samples: usize,
    pub impurity: f64,
    pub depth: usize,
    /// Class proportions (classification) or `[mean]` (regression).
    pub value: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
}

struct Best {
    feature: usize,
    threshold: f64,
    score: f64,
    split_at: usize,
}

struct Builder<'a> {
    x: ArrayView2<'a, f64>,
    target: Target<'a>,
    params: &'a TreeParams,
    n_try: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn node_stats(&self, idx: &[usize]) -> (f64, Vec<f64>, bool) {
        let n = idx.len() as f64;
        match self.target {
            Target::Classes { labels, n_classes } => {
                let mut counts = vec![0.0; n_classes];
                for &i in idx {
                    counts[labels[i]] += 1.0;
                }
                let gini = 1.0 - counts.iter().map(|c| (c / n) * (c / n)).sum::<f64>();
                let pure = counts.iter().filter(|c| **c > 0.0).count() <= 1;
                (gini.max(0.0), counts.iter().map(|c| c / n).collect(), pure)
            }
            Target::Values(y) => {
                let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / n;
                let var = idx.iter().map(|&i| (y[i] - mean) * (y[i] - mean)).sum::<f64>() / n;
                let first = y[idx[0]];
                let pure = idx.iter().all(|&i| y[i] == first);
                (var, vec![mean], pure)
            }
        }
    }

    /// Weighted child impurity `n_l * imp_l + n_r * imp_r` for every cut of a
    /// sorted index list; evaluated incrementally.
    fn scan_feature(&self, feature: usize, sorted: &[usize], best: &mut Option<Best>) {
        let n = sorted.len();
        let min_leaf = self.params.min_samples_leaf.max(1);
        let col = self.x.column(feature);
        match self.target {
            Target::Classes { labels, n_classes } => {
                let mut right = vec![0.0; n_classes];
                for &i in sorted {
                    right[labels[i]] += 1.0;
                }
                let mut left = vec![0.0; n_classes];
                let mut sq_left = 0.0;
                let mut sq_right: f64 = right.iter().map(|c| c * c).sum();
                for pos in 0..n - 1 {
                    let c = labels[sorted[pos]];
                    sq_left += 2.0 * left[c] + 1.0;
                    sq_right -= 2.0 * right[c] - 1.0;
                    left[c] += 1.0;
                    right[c] -= 1.0;
                    let nl = pos + 1;
                    let nr = n - nl;
                    let (a, b) = (col[sorted[pos]], col[sorted[pos + 1]]);
                    if nl < min_leaf || nr < min_leaf || a >= b {
                        continue;
                    }
                    let score = (nl as f64 - sq_left / nl as f64) + (nr as f64 - sq_right / nr as f64);
                    consider(best, feature, a, b, score, nl);
                }
            }
            Target::Values(y) => {
                let (mut sum_r, mut sq_r) = (0.0, 0.0);
                for &i in sorted {
                    sum_r += y[i];
                    sq_r += y[i] * y[i];
                }
                let (mut sum_l, mut sq_l) = (0.0, 0.0);
                for pos in 0..n - 1 {
                    let v = y[sorted[pos]];
                    sum_l += v;
                    sq_l += v * v;
                    sum_r -= v;
                    sq_r -= v * v;
                    let nl = pos + 1;
                    let nr = n - nl;
                    let (a, b) = (col[sorted[pos]], col[sorted[pos + 1]]);
                    if nl < min_leaf || nr < min_leaf || a >= b {
                        continue;
                    }
                    let sse_l = (sq_l - sum_l * sum_l / nl as f64).max(0.0);
                    let sse_r = (sq_r - sum_r * sum_r / nr as f64).max(0.0);
                    consider(best, feature, a, b, sse_l + sse_r, nl);
                }
            }
        }
    }

    fn build(&mut self, idx: &mut [usize], depth: usize, rng: &mut Rng) -> usize {
        let (impurity, value, pure) = self.node_stats(idx);
        let id = self.nodes.len();
        self.nodes.push(Node {
            kind: NodeKind::Leaf,
            n_samples: idx.len(),
            impurity,
            depth,
            value,
        });
        let depth_ok = self.params.max_depth.is_none_or(|m| depth < m);
        if pure || !depth_ok || idx.len() < self.params.min_samples_split.max(2) {
            return id;
        }
        let d = self.x.ncols();
        let features: Vec<usize> = if self.n_try >= d {
            (0..d).collect()
        } else {
            let mut f = rand::seq::index::sample(rng, d, self.n_try).into_vec();
            f.sort_unstable();
            f
        };
        let mut best: Option<Best> = None;
        let mut best_order: Vec<usize> = Vec::new();
        let mut order = idx.to_vec();
        for &f in &features {
            let col = self.x.column(f);
            order.copy_from_slice(idx);
            order.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
            let before = best.as_ref().map(|b| (b.feature, b.split_at));
            self.scan_feature(f, &order, &mut best);
            if best.as_ref().map(|b| (b.feature, b.split_at)) != before {
                best_order.clone_from(&order);
            }
        }
        let Some(best) = best else { return id };
        idx.copy_from_slice(&best_order);
        let (left_idx, right_idx) = idx.split_at_mut(best.split_at);
        let left = self.build(left_idx, depth + 1, rng);
        let right = self.build(right_idx, depth + 1, rng);
        self.nodes[id].kind = NodeKind::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }
}

fn consider(best: &mut Option<Best>, feature: usize, a: f64, b: f64, score: f64, split_at: usize) {
    if best.as_ref().is_none_or(|cur| score < cur.score) {
        let mut threshold = 0.5 * (a + b);
        if threshold >= b {
            threshold = a;
        }
        *best = Some(Best {
            feature,
            threshold,
            score,
            split_at,
        });
    }
}

impl Tree {
    /// Grows a tree on `rows` (duplicates allowed, e.g. a bootstrap sample).
    pub fn fit(
        x: ArrayView2<f64>,
        target: Target,
        rows: &[usize],
        params: &TreeParams,
        rng: &mut Rng,
    ) -> Tree {
        assert!(!rows.is_empty(), "cannot grow a tree on zero rows");
        let mut builder = Builder {
            x,
            target,
            params,
            n_try: params.max_features.resolve(x.ncols()),
            nodes: Vec::new(),
        };
        let mut idx = rows.to_vec();
        builder.build(&mut idx, 0, rng);
        Tree {
            nodes: builder.nodes,
            n_features: x.ncols(),
        }
    }

    pub fn leaf_for(&self, row: &[f64]) -> &Node {
        let mut id = 0;
        loop {
            match self.nodes[id].kind {
                NodeKind::Leaf => return &self.nodes[id],
                NodeKind::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => id = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> &[f64] {
        &self.leaf_for(row).value
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Leaf))
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Per-feature impurity decrease weighted by node sample fraction (not normalized).
    pub fn impurity_importance(&self) -> Vec<f64> {
        let mut imp = vec![0.0; self.n_features];
        let root = self.nodes[0].n_samples as f64;
        for node in &self.nodes {
            if let NodeKind::Split {
                feature,
                left,
                right,
                ..
            } = node.kind
            {
                let (l, r) = (&self.nodes[left], &self.nodes[right]);
                let decrease = node.n_samples as f64 * node.impurity
                    - l.n_samples as f64 * l.impurity
                    - r.n_samples as f64 * r.impurity;
                imp[feature] += decrease.max(0.0) / root;
            }
        }
        imp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use ndarray::{array, Array2};

    #[test]
    fn xor_needs_depth_two() {
        let mut x = Array2::zeros((40, 2));
        let mut labels = Vec::new();
        for i in 0..40 {
            let (a, b) = ((i % 2) as f64, ((i / 2) % 2) as f64);
            x[(i, 0)] = a + 0.01 * (i as f64 / 40.0);
            x[(i, 1)] = b - 0.01 * (i as f64 / 40.0);
            labels.push(((i % 2) ^ ((i / 2) % 2)) as usize);
        }
        let rows: Vec<usize> = (0..40).collect();
        let t = Tree::fit(
            x.view(),
            Target::Classes { labels: &labels, n_classes: 2 },
            &rows,
            &TreeParams::default(),
            &mut rng_from_seed(0),
        );
        assert!(t.depth() >= 2);
        for i in 0..40 {
            let p = t.predict_row(x.row(i).as_slice().unwrap());
            assert_eq!(p[labels[i]], 1.0);
        }
    }

    #[test]
    fn regression_step_recovered() {
        let x = array![[0.0], [1.0], [2.0], [3.0], [4.0], [5.0]];
        let y = [1.0, 1.0, 1.0, 4.0, 4.0, 4.0];
        let t = Tree::fit(
            x.view(),
            Target::Values(&y),
            &[0, 1, 2, 3, 4, 5],
            &TreeParams::default(),
            &mut rng_from_seed(1),
        );
        assert_eq!(t.n_nodes(), 3);
        assert_eq!(t.predict_row(&[2.4]), &[1.0]);
        assert_eq!(t.predict_row(&[2.6]), &[4.0]);
        let imp = t.impurity_importance();
        assert!((imp[0] - 2.25).abs() < 1e-12);
    }

    #[test]
    fn min_leaf_respected() {
        let x = Array2::from_shape_fn((20, 1), |(i, _)| i as f64);
        let y: Vec<f64> = (0..20).map(|i| (i * i) as f64).collect();
        let params = TreeParams {
            min_samples_leaf: 5,
            ..TreeParams::default()
        };
        let rows: Vec<usize> = (0..20).collect();
        let t = Tree::fit(x.view(), Target::Values(&y), &rows, &params, &mut rng_from_seed(2));
        assert!(t.leaves().all(|l| l.n_samples >= 5));
    }
}
