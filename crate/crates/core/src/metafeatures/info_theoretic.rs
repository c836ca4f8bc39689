use std::collections::BTreeMap;

use super::{scalar, Measures};
use crate::ingest::Dataset;
use crate::{is_missing, MISSING};

/// Equal-frequency bin index per value (`None` for MISSING). Cut points are
/// the observed values at sorted positions `floor(j * n / bins)`, `j = 1..bins`;
/// a value's bin is the number of cut points not above it.
pub fn discretize_equal_frequency(values: &[f64], bins: usize) -> Vec<Option<usize>> {
    let mut obs: Vec<f64> = values.iter().copied().filter(|v| !is_missing(*v)).collect();
    obs.sort_by(f64::total_cmp);
    let n = obs.len();
    let cuts: Vec<f64> = if n == 0 {
        Vec::new()
    } else {
        (1..bins).map(|j| obs[(j * n / bins).min(n - 1)]).collect()
    };
    values
        .iter()
        .map(|v| (!is_missing(*v)).then(|| cuts.partition_point(|c| *c <= *v)))
        .collect()
}

/// Shannon entropy in bits of a count table.
pub fn entropy_bits(counts: impl IntoIterator<Item = usize>) -> f64 {
    let counts: Vec<usize> = counts.into_iter().filter(|c| *c > 0).collect();
    let n: usize = counts.iter().sum();
    if n == 0 {
        return MISSING;
    }
    let n = n as f64;
    counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0)
}

fn codes(ds: &Dataset, j: usize, bins: usize) -> Vec<Option<usize>> {
    let col = ds.features.column(j).to_vec();
    if ds.column_kinds[j].is_categorical() {
        col.iter().map(|v| (!is_missing(*v)).then_some(*v as usize)).collect()
    } else {
        discretize_equal_frequency(&col, bins)
    }
}

/// `(H(A), I(A; C))` over rows where the attribute is observed.
fn attr_entropy_and_mi(codes: &[Option<usize>], labels: &[usize]) -> (f64, f64) {
    let mut a_counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut c_counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (a, &c) in codes.iter().zip(labels) {
        if let Some(a) = *a {
            *a_counts.entry(a).or_default() += 1;
            *c_counts.entry(c).or_default() += 1;
            *joint.entry((a, c)).or_default() += 1;
        }
    }
    let h_a = entropy_bits(a_counts.into_values());
    let h_c = entropy_bits(c_counts.into_values());
    let h_ac = entropy_bits(joint.into_values());
    if is_missing(h_a) {
        return (MISSING, MISSING);
    }
    (h_a, (h_a + h_c - h_ac).max(0.0))
}

/// `class_ent`, per-attribute `attr_ent` and `mut_inf`, `eq_num_attr`, `ns_ratio`.
pub fn extract_info_theoretic(ds: &Dataset, bins: usize) -> Measures {
    let class_ent = entropy_bits(ds.class_counts());
    let (attr_ent, mut_inf): (Vec<f64>, Vec<f64>) = (0..ds.n_features())
        .map(|j| attr_entropy_and_mi(&codes(ds, j, bins), &ds.labels))
        .unzip();
    let obs_mean = |v: &[f64]| {
        let o: Vec<f64> = v.iter().copied().filter(|x| !is_missing(*x)).collect();
        crate::stats::mean(&o)
    };
    let mean_mi = obs_mean(&mut_inf);
    let mean_ae = obs_mean(&attr_ent);
    let (eq_num_attr, ns_ratio) = if is_missing(mean_mi) || mean_mi <= 0.0 {
        (MISSING, MISSING)
    } else {
        (class_ent / mean_mi, (mean_ae - mean_mi) / mean_mi)
    };
    vec![
        scalar("class_ent", class_ent),
        ("attr_ent".into(), attr_ent),
        ("mut_inf".into(), mut_inf),
        scalar("eq_num_attr", eq_num_attr),
        scalar("ns_ratio", ns_ratio),
    ]
}
