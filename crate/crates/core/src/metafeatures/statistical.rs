use super::Measures;
use crate::ingest::Dataset;
use crate::stats::{mean, observed, pearson_masked, quantile_sorted, sample_sd, sorted};
use crate::MISSING;

/// Central moments `m2, m3, m4` of observed values (population form).
fn central_moments(v: &[f64]) -> (f64, f64, f64) {
    let m = mean(v);
    let n = v.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in v {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Fisher's `g1 = m3 / m2^1.5`; MISSING for a constant or empty column.
pub(crate) fn skewness(v: &[f64]) -> f64 {
    if v.is_empty() {
        return MISSING;
    }
    let (m2, m3, _) = central_moments(v);
    if m2 <= 0.0 {
        MISSING
    } else {
        m3 / m2.powf(1.5)
    }
}

/// Excess kurtosis `m4 / m2^2 - 3`.
pub(crate) fn kurtosis(v: &[f64]) -> f64 {
    if v.is_empty() {
        return MISSING;
    }
    let (m2, _, m4) = central_moments(v);
    if m2 <= 0.0 {
        MISSING
    } else {
        m4 / (m2 * m2) - 3.0
    }
}

/// Per numeric attribute: mean, sd, skewness, kurtosis, iqr; plus |r| over
/// numeric attribute pairs. Missing cells are ignored.
pub fn extract_statistical(ds: &Dataset) -> Measures {
    let numeric: Vec<Vec<f64>> = ds
        .column_kinds
        .iter()
        .enumerate()
        .filter(|(_, k)| !k.is_categorical())
        .map(|(j, _)| ds.features.column(j).to_vec())
        .collect();
    let obs: Vec<Vec<f64>> = numeric.iter().map(|c| observed(c)).collect();
    let per = |f: &dyn Fn(&[f64]) -> f64| -> Vec<f64> { obs.iter().map(|c| f(c)).collect() };
    let mut cor = Vec::new();
    for a in 0..numeric.len() {
        for b in (a + 1)..numeric.len() {
            cor.push(pearson_masked(&numeric[a], &numeric[b]).abs());
        }
    }
    vec![
        ("mean".into(), per(&mean)),
        (
            "sd".into(),
            per(&|c| if c.is_empty() { MISSING } else { sample_sd(c) }),
        ),
        ("skewness".into(), per(&skewness)),
        ("kurtosis".into(), per(&kurtosis)),
        (
            "iqr".into(),
            per(&|c| {
                let s = sorted(c);
                quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25)
            }),
        ),
        ("cor".into(), cor),
    ]
}
