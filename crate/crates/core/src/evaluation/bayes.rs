//! Closed-form Bayesian correlated t-test.
//!
//! The posterior of the mean difference is Student-t with `n - 1` degrees
//! of freedom, location `mean(d)` and scale² `(1/n + rho/(1 - rho)) s²`.
//! Differences are oriented so that positive values favor the right-hand
//! setting; `left`, `rope` and `right` are the posterior masses below
//! `-r`, within `[-r, r]` and above `r`.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::experiment::MetricTable;
use crate::metamodels::FeatureSetting;
use crate::{Error, Result};

pub const DEFAULT_ROPE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Rmse,
    R2,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Rmse => "rmse",
            Metric::R2 => "r2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesResult {
    pub left: f64,
    pub rope: f64,
    pub right: f64,
    pub rope_halfwidth: f64,
    pub rho: f64,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

pub fn bayes_correlated_ttest(diffs: &[f64], rho: f64, rope_halfwidth: f64) -> Result<BayesResult> {
    let n = diffs.len();
    if n < 2 {
        return Err(Error::invalid(format!("correlated t-test needs at least 2 differences, got {n}")));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::invalid(format!("correlation {rho} not in [0, 1)")));
    }
    if !(rope_halfwidth >= 0.0) {
        return Err(Error::invalid("rope half-width must be non-negative"));
    }
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::NonFinite("fold differences".into()));
    }
    let nf = n as f64;
    let mean = diffs.iter().sum::<f64>() / nf;
    // identical differences have zero spread even when the mean rounds
    let var = if diffs.iter().all(|&d| d == diffs[0]) {
        0.0
    } else {
        diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (nf - 1.0)
    };
    let sd = var.sqrt();
    let r = rope_halfwidth;
    let (left, right) = if var > 0.0 {
        let scale = ((1.0 / nf + rho / (1.0 - rho)) * var).sqrt();
        let t = StudentsT::new(0.0, 1.0, nf - 1.0).map_err(|e| Error::invalid(e.to_string()))?;
        (t.cdf((-r - mean) / scale), t.cdf((mean - r) / scale))
    } else if mean < -r {
        (1.0, 0.0)
    } else if mean > r {
        (0.0, 1.0)
    } else {
        (0.0, 0.0)
    };
    Ok(BayesResult {
        left,
        // summed first so that swapping the tails leaves the rope bit-identical
        rope: (1.0 - (left + right)).max(0.0),
        right,
        rope_halfwidth: r,
        rho,
        n,
        mean,
        sd,
    })
}

/// Per-(repeat, fold) differences between two settings, averaged over every
/// inducer and target both settings share in that cell: `left - right` for
/// RMSE and `right - left` for R².
pub fn paired_differences(table: &MetricTable, left: FeatureSetting, right: FeatureSetting, metric: Metric) -> Vec<f64> {
    let mut cells: Vec<(usize, usize)> = table.rows.iter().map(|r| (r.repeat, r.fold)).collect();
    cells.dedup();
    cells.sort_unstable();
    cells.dedup();
    let value = |r: &super::MetricRow| match metric {
        Metric::Rmse => Some(r.rmse),
        Metric::R2 => r.r2,
    };
    let mut out = Vec::new();
    for (repeat, fold) in cells {
        let in_cell: Vec<_> = table.rows.iter().filter(|r| r.repeat == repeat && r.fold == fold).collect();
        let mut sum = 0.0;
        let mut count = 0usize;
        for a in in_cell.iter().filter(|r| r.setting == left) {
            let Some(b) = in_cell
                .iter()
                .find(|r| r.setting == right && r.inducer == a.inducer && r.target == a.target)
            else {
                continue;
            };
            if let (Some(va), Some(vb)) = (value(a), value(b)) {
                sum += match metric {
                    Metric::Rmse => va - vb,
                    Metric::R2 => vb - va,
                };
                count += 1;
            }
        }
        if count > 0 {
            out.push(sum / count as f64);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesComparison {
    pub left: FeatureSetting,
    pub right: FeatureSetting,
    pub metric: Metric,
    pub result: BayesResult,
}

/// Pairs compared in reports: Traditional vs Abstract, PCA vs Abstract,
/// Traditional vs PCA.
pub const STANDARD_PAIRS: [(FeatureSetting, FeatureSetting); 3] = [
    (FeatureSetting::Traditional, FeatureSetting::Abstract),
    (FeatureSetting::Pca, FeatureSetting::Abstract),
    (FeatureSetting::Traditional, FeatureSetting::Pca),
];

/// Both metrics for every standard pair whose settings both appear in `table`.
pub fn standard_comparisons(table: &MetricTable, rho: f64, rope_halfwidth: f64) -> Result<Vec<BayesComparison>> {
    let mut out = Vec::new();
    for (left, right) in STANDARD_PAIRS {
        for metric in [Metric::Rmse, Metric::R2] {
            let diffs = paired_differences(table, left, right, metric);
            if diffs.len() < 2 {
                continue;
            }
            out.push(BayesComparison {
                left,
                right,
                metric,
                result: bayes_correlated_ttest(&diffs, rho, rope_halfwidth)?,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand_distr::{Distribution, StudentT};

    #[test]
    fn symmetric_diffs_equal_tails() {
        let d = [-0.3, -0.1, 0.1, 0.3];
        let r = bayes_correlated_ttest(&d, 0.1, 0.01).unwrap();
        assert!((r.left - r.right).abs() < 1e-15);
        assert!((r.left + r.rope + r.right - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inside_rope() {
        let r = bayes_correlated_ttest(&[0.004; 10], 0.1, 0.01).unwrap();
        assert_eq!((r.left, r.rope, r.right), (0.0, 1.0, 0.0));
        let r = bayes_correlated_ttest(&[-0.5; 10], 0.1, 0.01).unwrap();
        assert_eq!(r.left, 1.0);
    }

    #[test]
    fn sign_flip_swaps_tails_exactly() {
        let d: Vec<f64> = (0..20).map(|i| ((i * 7) % 11) as f64 * 0.013 - 0.04).collect();
        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
        let a = bayes_correlated_ttest(&d, 0.1, 0.01).unwrap();
        let b = bayes_correlated_ttest(&neg, 0.1, 0.01).unwrap();
        assert_eq!(a.left, b.right);
        assert_eq!(a.right, b.left);
        assert_eq!(a.rope, b.rope);
    }

    #[test]
    fn wider_rope_never_shrinks() {
        let d: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin() * 0.05 + 0.01).collect();
        let mut last = 0.0;
        for k in 0..20 {
            let r = bayes_correlated_ttest(&d, 0.1, k as f64 * 0.005).unwrap();
            assert!(r.rope >= last);
            last = r.rope;
        }
    }

    #[test]
    fn monte_carlo_agreement() {
        // mean 0.1, sd 0.01 by construction: alternate +-0.01 * sqrt((n-1)/n)
        let n = 100;
        let a = 0.01 * ((n - 1) as f64 / n as f64).sqrt();
        let d: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 0.1 + a } else { 0.1 - a }).collect();
        let r = bayes_correlated_ttest(&d, 0.1, 0.01).unwrap();
        assert!((r.sd - 0.01).abs() < 1e-12);
        assert!(r.right > 0.999);
        let scale = ((1.0 / n as f64 + 0.1 / 0.9) * r.sd * r.sd).sqrt();
        let t = StudentT::new((n - 1) as f64).unwrap();
        let mut rng = rng_from_seed(1);
        let draws = 200_000;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            let v = r.mean + scale * t.sample(&mut rng);
            counts[if v < -0.01 { 0 } else if v > 0.01 { 2 } else { 1 }] += 1;
        }
        let mc = counts.map(|c| c as f64 / draws as f64);
        assert!((mc[0] - r.left).abs() < 0.005);
        assert!((mc[1] - r.rope).abs() < 0.005);
        assert!((mc[2] - r.right).abs() < 0.005);
    }

    #[test]
    fn preconditions() {
        assert!(bayes_correlated_ttest(&[0.1], 0.1, 0.01).is_err());
        assert!(bayes_correlated_ttest(&[0.1, 0.2], 1.0, 0.01).is_err());
    }
}
