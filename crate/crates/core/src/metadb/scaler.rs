use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

/// Per-column z-scoring with population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Scaler {
    pub fn fit(x: ArrayView2<f64>) -> Scaler {
        let n = x.nrows() as f64;
        let mut mean = Vec::with_capacity(x.ncols());
        let mut sd = Vec::with_capacity(x.ncols());
        for col in x.columns() {
            let m = col.sum() / n;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            mean.push(m);
            sd.push(var.max(0.0).sqrt());
        }
        Scaler { mean, sd }
    }

    /// Columns with zero spread; these map to 0.
    pub fn constant_columns(&self) -> Vec<bool> {
        self.sd.iter().map(|s| *s == 0.0).collect()
    }

    pub fn transform(&self, x: ArrayView2<f64>) -> Array2<f64> {
        assert_eq!(x.ncols(), self.mean.len(), "scaler width mismatch");
        let mut out = x.to_owned();
        for (j, mut col) in out.columns_mut().into_iter().enumerate() {
            let (m, s) = (self.mean[j], self.sd[j]);
            col.mapv_inplace(|v| if s == 0.0 { 0.0 } else { (v - m) / s });
        }
        out
    }

    pub fn inverse_transform(&self, z: ArrayView2<f64>) -> Array2<f64> {
        let mut out = z.to_owned();
        for (j, mut col) in out.columns_mut().into_iter().enumerate() {
            let (m, s) = (self.mean[j], self.sd[j]);
            col.mapv_inplace(|v| v * s + m);
        }
        out
    }
}

/// [`Scaler::fit`] as a free function.
pub fn fit_scaler(x: ArrayView2<f64>) -> Scaler {
    Scaler::fit(x)
}

pub fn apply_scaler(scaler: &Scaler, x: ArrayView2<f64>) -> Array2<f64> {
    scaler.transform(x)
}
