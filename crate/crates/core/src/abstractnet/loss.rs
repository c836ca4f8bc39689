use ndarray::{Array2, ArrayView2, Zip};

/// `0.5 u^2 / lambda` for `|u| < lambda`, else `|u| - 0.5 lambda`.
#[inline]
pub fn smooth_l1_point(u: f64, lambda: f64) -> f64 {
    if u.abs() < lambda {
        0.5 * u * u / lambda
    } else {
        u.abs() - 0.5 * lambda
    }
}

#[inline]
pub fn smooth_l1_point_deriv(u: f64, lambda: f64) -> f64 {
    if u.abs() < lambda {
        u / lambda
    } else if u > 0.0 {
        1.0
    } else if u < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Mean of the pointwise loss over every element of the batch.
pub fn smooth_l1(pred: ArrayView2<f64>, target: ArrayView2<f64>, lambda: f64) -> f64 {
    assert_eq!(pred.dim(), target.dim(), "prediction/target shape mismatch");
    let mut total = 0.0;
    Zip::from(&pred).and(&target).for_each(|&p, &t| total += smooth_l1_point(p - t, lambda));
    total / pred.len() as f64
}

/// Gradient of [`smooth_l1`] with respect to `pred`.
pub fn smooth_l1_grad(pred: ArrayView2<f64>, target: ArrayView2<f64>, lambda: f64) -> Array2<f64> {
    assert_eq!(pred.dim(), target.dim(), "prediction/target shape mismatch");
    let n = pred.len() as f64;
    Zip::from(&pred)
        .and(&target)
        .map_collect(|&p, &t| smooth_l1_point_deriv(p - t, lambda) / n)
}
