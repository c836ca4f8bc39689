use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Slack on the cumulative-variance comparison so a target of exactly 1.0
/// is met despite rounding.
const CUMULATIVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Array1<f64>,
    /// All `d` components as rows, by decreasing eigenvalue.
    pub components: Array2<f64>,
    pub explained_variance: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    pub retained: usize,
}

/// Smallest `m` whose leading `m` ratios reach `target`.
pub fn retained_count(ratios: &[f64], target: f64) -> usize {
    let mut cumulative = 0.0;
    for (i, r) in ratios.iter().enumerate() {
        cumulative += r;
        if cumulative >= target - CUMULATIVE_SLACK {
            return i + 1;
        }
    }
    ratios.len()
}

/// Eigendecomposition of the sample covariance (divisor `n - 1`). Each
/// component's largest-magnitude loading is made positive.
pub fn pca_fit(x: ArrayView2<f64>, var_target: f64) -> Result<PcaModel> {
    let (n, d) = x.dim();
    if n < 2 {
        return Err(Error::invalid("PCA needs at least two rows"));
    }
    if !(var_target > 0.0 && var_target <= 1.0) {
        return Err(Error::invalid(format!("variance target {var_target} not in (0, 1]")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("PCA input".into()));
    }
    let mean = x.mean_axis(Axis(0)).expect("non-empty");
    let centered = &x - &mean;
    let cov = centered.t().dot(&centered) / (n - 1) as f64;
    let eig = SymmetricEigen::new(DMatrix::from_fn(d, d, |i, j| cov[(i, j)]));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let explained_variance: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
    let total: f64 = explained_variance.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid("PCA input has zero variance (all rows identical)"));
    }
    let mut components = Array2::zeros((d, d));
    for (row, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let mut pivot = 0;
        for i in 0..d {
            if v[i].abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..d {
            components[(row, i)] = sign * v[i];
        }
    }
    let explained_variance_ratio: Vec<f64> = explained_variance.iter().map(|v| v / total).collect();
    let retained = retained_count(&explained_variance_ratio, var_target);
    Ok(PcaModel {
        mean,
        components,
        explained_variance,
        explained_variance_ratio,
        retained,
    })
}

/// Centered `x` projected on the retained components.
pub fn pca_transform(model: &PcaModel, x: ArrayView2<f64>) -> Result<Array2<f64>> {
    if x.ncols() != model.mean.len() {
        return Err(Error::Shape(format!(
            "PCA fitted on {} columns, got {}",
            model.mean.len(),
            x.ncols()
        )));
    }
    let retained = model.components.slice(ndarray::s![..model.retained, ..]);
    Ok((&x - &model.mean).dot(&retained.t()))
}

impl PcaModel {
    pub fn width(&self) -> usize {
        self.retained
    }

    /// Maps scores back to the (centered) input space.
    pub fn reconstruct_centered(&self, scores: ArrayView2<f64>) -> Array2<f64> {
        scores.dot(&self.components.slice(ndarray::s![..scores.ncols(), ..]))
    }
}
