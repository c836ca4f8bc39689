use rand::seq::SliceRandom;

use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// Fold index per instance. Each class's instances are shuffled, the class
/// lists concatenated, and position `p` assigned to fold `p % k`, so every
/// fold holds `floor` or `ceil` of `n_c / k` instances of each class.
pub fn stratified_folds(labels: &[usize], n_classes: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {k}")));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class
            .get_mut(l)
            .ok_or_else(|| Error::invalid(format!("label {l} out of range")))?
            .push(i);
    }
    for (c, members) in by_class.iter().enumerate() {
        if !members.is_empty() && members.len() < k {
            return Err(Error::invalid(format!(
                "class {c} has {} instances, fewer than {k} folds",
                members.len()
            )));
        }
    }
    let mut rng = rng_from_seed(seed);
    let mut assignment = vec![0; labels.len()];
    let mut p = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            assignment[i] = p % k;
            p += 1;
        }
    }
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn partition_and_balance(
            counts in proptest::collection::vec(5usize..40, 2..5),
            k in 2usize..6,
            seed in any::<u64>(),
        ) {
            let labels: Vec<usize> = counts.iter().enumerate().flat_map(|(c, &n)| std::iter::repeat_n(c, n)).collect();
            let folds = stratified_folds(&labels, counts.len(), k, seed).unwrap();
            prop_assert_eq!(folds.len(), labels.len());
            prop_assert!(folds.iter().all(|&f| f < k));
            for (c, &n) in counts.iter().enumerate() {
                for f in 0..k {
                    let in_fold = labels.iter().zip(&folds).filter(|(l, ff)| **l == c && **ff == f).count();
                    prop_assert!(in_fold == n / k || in_fold == n.div_ceil(k), "class {} fold {}: {}", c, f, in_fold);
                }
            }
        }
    }

    #[test]
    fn too_small_class() {
        assert!(stratified_folds(&[0, 0, 0, 1], 2, 3, 0).is_err());
    }
}
