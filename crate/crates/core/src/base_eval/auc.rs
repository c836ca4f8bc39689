//! Rank-based AUC and its multiclass generalization (Hand & Till M-measure).

use ndarray::ArrayView2;

use crate::{Error, Result};

/// Binary AUC: probability that a random positive outscores a random negative,
/// ties counted one half. Computed from mid-ranks.
///
/// Returns `None` when either group is empty.
pub fn auc_binary(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let n_pos = positive.iter().filter(|p| **p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the mid-rank keeps every quantity an exact integer.
    let mut rank_sum_x2 = 0u64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1; mid-rank * 2 = i + j + 2.
        let mid_x2 = (i + j + 2) as u64;
        for &k in &order[i..=j] {
            if positive[k] {
                rank_sum_x2 += mid_x2;
            }
        }
        i = j + 1;
    }
    let np = n_pos as u64;
    // U * 2 = rank_sum * 2 - n_pos (n_pos + 1)
    let u_x2 = rank_sum_x2 - np * (np + 1);
    Some(u_x2 as f64 / 2.0 / (n_pos as f64 * n_neg as f64))
}

/// AUC of `scores` (n x C) against `labels`.
///
/// With two columns this is the binary AUC of column 1. With more, it is the
/// unweighted mean over unordered class pairs `(i, j)` of
/// `(A(i|j) + A(j|i)) / 2`, where `A(i|j)` ranks class-`i` against class-`j`
/// instances by column `i`. Pairs with an absent class are skipped.
pub fn auc_multiclass(scores: ArrayView2<f64>, labels: &[usize]) -> Result<f64> {
    let (n, c) = scores.dim();
    if labels.len() != n {
        return Err(Error::Shape(format!("{} labels for {n} score rows", labels.len())));
    }
    if scores.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("AUC scores".into()));
    }
    if labels.iter().any(|&l| l >= c) {
        return Err(Error::invalid("label index exceeds score columns"));
    }
    if c == 2 {
        let col: Vec<f64> = scores.column(1).to_vec();
        let pos: Vec<bool> = labels.iter().map(|&l| l == 1).collect();
        return auc_binary(&col, &pos).ok_or_else(|| Error::invalid("AUC needs both classes present"));
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..c {
        for j in (i + 1)..c {
            let rows: Vec<usize> = (0..n).filter(|&r| labels[r] == i || labels[r] == j).collect();
            let pos_i: Vec<bool> = rows.iter().map(|&r| labels[r] == i).collect();
            let s_i: Vec<f64> = rows.iter().map(|&r| scores[(r, i)]).collect();
            let pos_j: Vec<bool> = rows.iter().map(|&r| labels[r] == j).collect();
            let s_j: Vec<f64> = rows.iter().map(|&r| scores[(r, j)]).collect();
            if let (Some(a_ij), Some(a_ji)) = (auc_binary(&s_i, &pos_i), auc_binary(&s_j, &pos_j)) {
                total += (a_ij + a_ji) / 2.0;
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        return Err(Error::invalid("AUC needs at least one class pair present"));
    }
    Ok(total / pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn binary(pos: &[f64], neg: &[f64]) -> f64 {
        let mut s = Array2::zeros((pos.len() + neg.len(), 2));
        let mut labels = Vec::new();
        for (r, v) in pos.iter().chain(neg).enumerate() {
            s[(r, 1)] = *v;
            s[(r, 0)] = -*v;
            labels.push(usize::from(r < pos.len()));
        }
        auc_multiclass(s.view(), &labels).unwrap()
    }

    #[test]
    fn perfect_ranking() {
        assert_eq!(binary(&[0.9, 0.8], &[0.3, 0.2]), 1.0);
    }

    #[test]
    fn three_of_four_pairs() {
        assert_eq!(binary(&[0.9, 0.3], &[0.8, 0.2]), 0.75);
        assert_eq!(binary(&[-0.9, -0.3], &[-0.8, -0.2]), 0.25);
    }

    #[test]
    fn ties_count_half() {
        assert_eq!(binary(&[0.5], &[0.5]), 0.5);
    }

    #[test]
    fn missing_class_pairs() {
        let s = Array2::from_elem((3, 3), 0.3);
        // only classes 0 and 1 present: one pair evaluated
        assert!(auc_multiclass(s.view(), &[0, 1, 1]).is_ok());
        assert!(auc_multiclass(s.view(), &[2, 2, 2]).is_err());
    }
}
