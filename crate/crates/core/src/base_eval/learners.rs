//! Base classifiers. Inputs are expected to be standardized already.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{softmax_rows, BaseLearnerKind};
use crate::abstractnet::{Activation, Adam, Mlp, Mode};
use crate::rng::{derive_seed, rng_from_seed};
use crate::tree::{MaxFeatures, Target, Tree, TreeParams};
use crate::{Error, Result};

/// Fits `kind` on the training split and returns `n_test x n_classes` scores.
pub fn fit_predict_proba(
    kind: BaseLearnerKind,
    x_train: &Array2<f64>,
    y_train: &[usize],
    n_classes: usize,
    x_test: &Array2<f64>,
    seed: u64,
) -> Result<Array2<f64>> {
    if x_train.nrows() == 0 || x_train.nrows() != y_train.len() {
        return Err(Error::Shape(format!("{} rows vs {} labels", x_train.nrows(), y_train.len())));
    }
    match kind {
        BaseLearnerKind::Svm => {
            Ok(SvmClassifier::default().fit(x_train.view(), y_train, n_classes, seed).predict_proba(x_test.view()))
        }
        BaseLearnerKind::Rf => Ok(RandomForestClassifier::default()
            .fit(x_train.view(), y_train, n_classes, seed)
            .predict_proba(x_test.view())),
        BaseLearnerKind::Mlp => MlpClassifier::default()
            .fit(x_train.view(), y_train, n_classes, seed)?
            .predict_proba(x_test.view()),
    }
}

/// Linear one-vs-rest SVM trained with Pegasos sub-gradient steps. The bias is
/// an extra constant input, so it is regularized like the weights.
#[derive(Debug, Clone)]
pub struct SvmClassifier {
    pub lambda: f64,
    pub epochs: usize,
    /// `n_classes x (d + 1)`, bias last.
    weights: Array2<f64>,
}

impl Default for SvmClassifier {
    fn default() -> Self {
        SvmClassifier {
            lambda: 1e-3,
            epochs: 50,
            weights: Array2::zeros((0, 0)),
        }
    }
}

impl SvmClassifier {
    pub fn fit(mut self, x: ArrayView2<f64>, y: &[usize], n_classes: usize, seed: u64) -> Self {
        let (n, d) = x.dim();
        self.weights = Array2::zeros((n_classes, d + 1));
        for c in 0..n_classes {
            let mut rng = rng_from_seed(derive_seed(seed, &[c as u64]));
            let mut w = Array1::<f64>::zeros(d + 1);
            let mut order: Vec<usize> = (0..n).collect();
            let mut t = 0u64;
            for _ in 0..self.epochs {
                order.shuffle(&mut rng);
                for &i in &order {
                    t += 1;
                    let eta = 1.0 / (self.lambda * t as f64);
                    let yi = if y[i] == c { 1.0 } else { -1.0 };
                    let row = x.row(i);
                    let margin = yi * (row.dot(&w.slice(ndarray::s![..d])) + w[d]);
                    w *= 1.0 - eta * self.lambda;
                    if margin < 1.0 {
                        w.slice_mut(ndarray::s![..d]).scaled_add(eta * yi, &row);
                        w[d] += eta * yi;
                    }
                }
            }
            self.weights.row_mut(c).assign(&w);
        }
        self
    }

    pub fn decision_function(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let d = x.ncols();
        let w = self.weights.slice(ndarray::s![.., ..d]);
        let b = self.weights.column(d);
        x.dot(&w.t()) + b
    }

    /// Softmax over the one-vs-rest margins.
    pub fn predict_proba(&self, x: ArrayView2<f64>) -> Array2<f64> {
        softmax_rows(self.decision_function(x))
    }
}

/// Bagged Gini trees with `sqrt(d)` candidate features per split; scores
/// are per-class vote proportions.
#[derive(Debug, Clone)]
pub struct RandomForestClassifier {
    pub n_trees: usize,
    pub params: TreeParams,
    n_classes: usize,
    trees: Vec<Tree>,
}

impl Default for RandomForestClassifier {
    fn default() -> Self {
        RandomForestClassifier {
            n_trees: 100,
            params: TreeParams {
                max_features: MaxFeatures::Sqrt,
                ..TreeParams::default()
            },
            n_classes: 0,
            trees: Vec::new(),
        }
    }
}

impl RandomForestClassifier {
    pub fn fit(mut self, x: ArrayView2<f64>, y: &[usize], n_classes: usize, seed: u64) -> Self {
        let n = x.nrows();
        self.n_classes = n_classes;
        self.trees = (0..self.n_trees)
            .map(|t| {
                let mut rng = rng_from_seed(derive_seed(seed, &[t as u64]));
                let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                Tree::fit(
                    x,
                    Target::Classes { labels: y, n_classes },
                    &rows,
                    &self.params,
                    &mut rng,
                )
            })
            .collect();
        self
    }

    pub fn predict_proba(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut votes = Array2::zeros((x.nrows(), self.n_classes));
        for (i, row) in x.axis_iter(Axis(0)).enumerate() {
            let row = row.to_vec();
            for tree in &self.trees {
                let dist = tree.predict_row(&row);
                let best = argmax(dist);
                votes[(i, best)] += 1.0;
            }
        }
        votes / self.trees.len() as f64
    }
}

/// First index of the maximum.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// One hidden ReLU layer with a softmax output, trained on cross-entropy with Adam.
#[derive(Debug, Clone)]
pub struct MlpClassifier {
    pub hidden: usize,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    net: Option<Mlp>,
}

impl Default for MlpClassifier {
    fn default() -> Self {
        MlpClassifier {
            hidden: 32,
            lr: 0.01,
            epochs: 200,
            batch_size: 32,
            net: None,
        }
    }
}

impl MlpClassifier {
    pub fn fit(mut self, x: ArrayView2<f64>, y: &[usize], n_classes: usize, seed: u64) -> Result<Self> {
        let (n, d) = x.dim();
        let mut net = Mlp::from_dims(&[d, self.hidden, n_classes], Activation::Relu, Vec::new(), seed)?;
        net.mode = Mode::Eval;
        let mut adam = Adam::new(&net, 0.9, 0.999, 1e-8);
        let mut rng = rng_from_seed(derive_seed(seed, &[1]));
        let mut order: Vec<usize> = (0..n).collect();
        for _ in 0..self.epochs {
            order.shuffle(&mut rng);
            for rows in order.chunks(self.batch_size.max(1)) {
                let xb = x.select(Axis(0), rows);
                let pass = net.forward_eval(xb.view())?;
                let mut grad = softmax_rows(pass.output.clone());
                for (r, &i) in rows.iter().enumerate() {
                    grad[(r, y[i])] -= 1.0;
                }
                grad /= rows.len() as f64;
                let grads = net.backward(&pass, grad.view());
                adam.step(&mut net, &grads, self.lr);
            }
        }
        if net.flat_params().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("MLP classifier weights".into()));
        }
        self.net = Some(net);
        Ok(self)
    }

    pub fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        let net = self.net.as_ref().ok_or_else(|| Error::invalid("classifier not fitted"))?;
        Ok(softmax_rows(net.predict(x)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn three_clusters() -> (Array2<f64>, Vec<usize>) {
        let centers = [(-4.0, 0.0), (4.0, 0.0), (0.0, 5.0)];
        let mut x = Array2::zeros((60, 2));
        let mut y = Vec::new();
        for i in 0..60 {
            let c = i % 3;
            let jitter = ((i * 37) % 11) as f64 / 11.0 - 0.5;
            x[(i, 0)] = centers[c].0 + jitter;
            x[(i, 1)] = centers[c].1 - jitter;
            y.push(c);
        }
        (x, y)
    }

    #[test]
    fn probabilities_sum_to_one() {
        let (x, y) = three_clusters();
        for kind in BaseLearnerKind::ALL {
            let p = fit_predict_proba(kind, &x, &y, 3, &x, 3).unwrap();
            for row in p.rows() {
                assert_abs_diff_eq!(row.sum(), 1.0, epsilon = 1e-9);
            }
            let correct = (0..60).filter(|&i| argmax(&p.row(i).to_vec()) == y[i]).count();
            assert!(correct >= 57, "{kind:?} {correct}");
        }
    }

    #[test]
    fn argmax_first_on_ties() {
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.1, 0.7, 0.7]), 1);
    }
}
