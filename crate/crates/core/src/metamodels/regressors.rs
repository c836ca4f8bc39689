use ndarray::{Array1, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::metadb::Scaler;
use crate::rng::{derive_seed, rng_from_seed};
use crate::tree::{MaxFeatures, Target, Tree, TreeParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegressorKind {
    Dt,
    Rf,
    Svr,
}

impl RegressorKind {
    pub const ALL: [RegressorKind; 3] = [RegressorKind::Dt, RegressorKind::Rf, RegressorKind::Svr];

    pub fn as_str(self) -> &'static str {
        match self {
            RegressorKind::Dt => "dt",
            RegressorKind::Rf => "rf",
            RegressorKind::Svr => "svr",
        }
    }
}

impl std::str::FromStr for RegressorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RegressorKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown meta-inducer `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    pub epochs: usize,
    /// Initial step; step `t` uses `lr / (1 + t / n)`.
    pub lr: f64,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            c: 1.0,
            epsilon: 0.1,
            epochs: 200,
            lr: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegressorParams {
    /// Shared by the single tree and every forest tree; the forest overrides
    /// `max_features` with `forest_max_features`.
    pub tree: TreeParams,
    pub n_trees: usize,
    pub bootstrap: bool,
    pub forest_max_features: MaxFeatures,
    pub svr: SvrParams,
}

impl Default for RegressorParams {
    fn default() -> Self {
        RegressorParams {
            tree: TreeParams {
                min_samples_leaf: 5,
                ..TreeParams::default()
            },
            n_trees: 100,
            bootstrap: true,
            forest_max_features: MaxFeatures::Third,
            svr: SvrParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Fitted {
    Tree(Tree),
    Forest(Vec<Tree>),
    /// Weights act on standardized inputs.
    Linear { scaler: Scaler, weights: Array1<f64>, intercept: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorModel {
    pub kind: RegressorKind,
    pub params: RegressorParams,
    pub seed: u64,
    pub n_features: usize,
    pub fitted: Fitted,
}

pub fn fit(kind: RegressorKind, x: ArrayView2<f64>, y: ArrayView1<f64>, params: &RegressorParams, seed: u64) -> Result<RegressorModel> {
    let (n, d) = x.dim();
    if n == 0 {
        return Err(Error::EmptyData);
    }
    if y.len() != n {
        return Err(Error::Shape(format!("{n} rows vs {} targets", y.len())));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("meta-regressor training data".into()));
    }
    let y = y.to_vec();
    let rows: Vec<usize> = (0..n).collect();
    let fitted = match kind {
        RegressorKind::Dt => Fitted::Tree(Tree::fit(x, Target::Values(&y), &rows, &params.tree, &mut rng_from_seed(seed))),
        RegressorKind::Rf => {
            let tree_params = TreeParams {
                max_features: params.forest_max_features,
                ..params.tree.clone()
            };
            let trees = (0..params.n_trees.max(1))
                .map(|t| {
                    let mut rng = rng_from_seed(derive_seed(seed, &[t as u64]));
                    let sample: Vec<usize> = if params.bootstrap {
                        (0..n).map(|_| rng.random_range(0..n)).collect()
                    } else {
                        rows.clone()
                    };
                    Tree::fit(x, Target::Values(&y), &sample, &tree_params, &mut rng)
                })
                .collect();
            Fitted::Forest(trees)
        }
        RegressorKind::Svr => fit_svr(x, &y, &params.svr, seed),
    };
    Ok(RegressorModel {
        kind,
        params: params.clone(),
        seed,
        n_features: d,
        fitted,
    })
}

/// Stochastic sub-gradient descent on
/// `||w||^2 / (2 C n) + mean(max(0, |y - w.z - b| - eps))` over standardized `z`.
fn fit_svr(x: ArrayView2<f64>, y: &[f64], p: &SvrParams, seed: u64) -> Fitted {
    let n = x.nrows();
    let scaler = Scaler::fit(x);
    let z = scaler.transform(x);
    let lambda = 1.0 / (p.c * n as f64);
    let mut w = Array1::<f64>::zeros(x.ncols());
    let mut b = y.iter().sum::<f64>() / n as f64;
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0usize;
    for _ in 0..p.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let lr = p.lr / (1.0 + t as f64 / n as f64);
            t += 1;
            let row = z.row(i);
            let r = y[i] - (row.dot(&w) + b);
            w *= 1.0 - lr * lambda;
            if r.abs() > p.epsilon {
                let g = r.signum();
                w.scaled_add(lr * g, &row);
                b += lr * g;
            }
        }
    }
    Fitted::Linear {
        scaler,
        weights: w,
        intercept: b,
    }
}

impl RegressorModel {
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Array1<f64>> {
        if x.ncols() != self.n_features {
            return Err(Error::Shape(format!(
                "model expects {} features, got {}",
                self.n_features,
                x.ncols()
            )));
        }
        Ok(match &self.fitted {
            Fitted::Tree(tree) => x.axis_iter(Axis(0)).map(|r| tree.predict_row(&r.to_vec())[0]).collect(),
            Fitted::Forest(trees) => x
                .axis_iter(Axis(0))
                .map(|r| {
                    let row = r.to_vec();
                    trees.iter().map(|t| t.predict_row(&row)[0]).sum::<f64>() / trees.len() as f64
                })
                .collect(),
            Fitted::Linear {
                scaler,
                weights,
                intercept,
            } => scaler.transform(x).dot(weights) + *intercept,
        })
    }

    /// Linear SVR slope per original (unstandardized) feature.
    pub fn linear_coefficients(&self) -> Option<Array1<f64>> {
        match &self.fitted {
            Fitted::Linear { scaler, weights, .. } => Some(
                weights
                    .iter()
                    .zip(&scaler.sd)
                    .map(|(w, sd)| if *sd > 0.0 { w / sd } else { 0.0 })
                    .collect(),
            ),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Importance {
    /// Normalized to sum 1.
    pub scores: Vec<f64>,
    /// No tree split anywhere; `scores` is uniform.
    pub degenerate: bool,
}

/// Impurity (variance) decrease per feature, weighted by node sample
/// fraction, averaged over trees and normalized to sum 1.
pub fn gini_importance(model: &RegressorModel) -> Result<Importance> {
    let Fitted::Forest(trees) = &model.fitted else {
        return Err(Error::invalid("impurity importance needs a random forest model"));
    };
    let d = model.n_features;
    let mut total = vec![0.0; d];
    for tree in trees {
        for (acc, v) in total.iter_mut().zip(tree.impurity_importance()) {
            *acc += v / trees.len() as f64;
        }
    }
    let sum: f64 = total.iter().sum();
    if sum > 0.0 {
        Ok(Importance {
            scores: total.iter().map(|v| v / sum).collect(),
            degenerate: false,
        })
    } else {
        Ok(Importance {
            scores: vec![1.0 / d as f64; d],
            degenerate: true,
        })
    }
}
