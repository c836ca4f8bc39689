use serde::{Deserialize, Serialize};

use super::experiment::{MetricRow, MetricTable};
use crate::base_eval::BaseLearnerKind;
use crate::metamodels::{FeatureSetting, RegressorKind};

pub fn rmse(pred: &[f64], truth: &[f64]) -> f64 {
    assert_eq!(pred.len(), truth.len(), "rmse length mismatch");
    let sse: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    (sse / pred.len() as f64).sqrt()
}

/// `1 - SSE / SST`; `None` when `truth` has no spread.
pub fn r2(pred: &[f64], truth: &[f64]) -> Option<f64> {
    assert_eq!(pred.len(), truth.len(), "r2 length mismatch");
    let mean = truth.iter().sum::<f64>() / truth.len() as f64;
    let sst: f64 = truth.iter().map(|t| (t - mean) * (t - mean)).sum();
    if sst <= 0.0 {
        return None;
    }
    let sse: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Some(1.0 - sse / sst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub setting: FeatureSetting,
    pub inducer: RegressorKind,
    pub target: BaseLearnerKind,
    pub cells: usize,
    pub rmse_mean: f64,
    pub rmse_sd: f64,
    /// Cells with a defined R².
    pub r2_cells: usize,
    pub r2_mean: Option<f64>,
    pub r2_sd: Option<f64>,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let sd = if v.len() > 1 {
        (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (m, sd)
}

/// Mean and sample sd per `(setting, inducer, target)`, groups in first-seen order.
pub fn summarize_table(table: &MetricTable) -> Vec<SummaryRow> {
    let mut keys: Vec<(FeatureSetting, RegressorKind, BaseLearnerKind)> = Vec::new();
    for r in &table.rows {
        let k = (r.setting, r.inducer, r.target);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(setting, inducer, target)| {
            let group: Vec<&MetricRow> = table
                .rows
                .iter()
                .filter(|r| r.setting == setting && r.inducer == inducer && r.target == target)
                .collect();
            let rmses: Vec<f64> = group.iter().map(|r| r.rmse).collect();
            let r2s: Vec<f64> = group.iter().filter_map(|r| r.r2).collect();
            let (rmse_mean, rmse_sd) = mean_sd(&rmses);
            let (r2_mean, r2_sd) = if r2s.is_empty() {
                (None, None)
            } else {
                let (m, s) = mean_sd(&r2s);
                (Some(m), Some(s))
            };
            SummaryRow {
                setting,
                inducer,
                target,
                cells: group.len(),
                rmse_mean,
                rmse_sd,
                r2_cells: r2s.len(),
                r2_mean,
                r2_sd,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_identities() {
        let t = [1.0, 2.0, 4.0];
        assert_eq!(rmse(&t, &t), 0.0);
        assert_eq!(r2(&t, &t), Some(1.0));
        let m = 7.0 / 3.0;
        assert!(r2(&[m; 3], &t).unwrap().abs() < 1e-15);
        assert_eq!(rmse(&[2.0, 3.0, 5.0], &t), 1.0);
        assert_eq!(r2(&t, &[3.0; 3]), None);
    }

    fn row(repeat: usize, rmse: f64, r2: Option<f64>) -> MetricRow {
        MetricRow {
            repeat,
            fold: 0,
            setting: FeatureSetting::Abstract,
            inducer: RegressorKind::Rf,
            target: BaseLearnerKind::Svm,
            rmse,
            r2,
        }
    }

    #[test]
    fn constant_rows_zero_sd() {
        let table = MetricTable {
            rows: (0..5).map(|i| row(i, 0.2, Some(0.5))).collect(),
            failures: vec![],
        };
        let s = summarize_table(&table);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].rmse_sd, 0.0);
        assert_eq!(s[0].r2_sd, Some(0.0));
    }

    #[test]
    fn means_match_direct_recomputation() {
        let rows: Vec<MetricRow> = (0..10).map(|i| row(i, 0.1 * i as f64, (i % 3 != 0).then_some(i as f64 / 10.0))).collect();
        let table = MetricTable { rows: rows.clone(), failures: vec![] };
        let s = &summarize_table(&table)[0];
        let direct = rows.iter().map(|r| r.rmse).sum::<f64>() / 10.0;
        assert!((s.rmse_mean - direct).abs() < 1e-12);
        let r2s: Vec<f64> = rows.iter().filter_map(|r| r.r2).collect();
        assert!((s.r2_mean.unwrap() - r2s.iter().sum::<f64>() / r2s.len() as f64).abs() < 1e-12);
        assert_eq!(s.r2_cells, 6);
    }
}
