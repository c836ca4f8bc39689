use super::{mean_filled, scalar, Measures};
use crate::ingest::Dataset;
use crate::rng::rng_from_seed;
use crate::tree::{Target, Tree, TreeParams};

/// Structure of one unpruned Gini tree grown on the whole dataset.
pub fn extract_model_based(ds: &Dataset) -> Measures {
    let ds = mean_filled(ds);
    let rows: Vec<usize> = (0..ds.n_instances()).collect();
    // All features are candidates at every node, so the generator is never drawn from.
    let tree = Tree::fit(
        ds.features.view(),
        Target::Classes {
            labels: &ds.labels,
            n_classes: ds.n_classes(),
        },
        &rows,
        &TreeParams::default(),
        &mut rng_from_seed(0),
    );
    let leaves: Vec<_> = tree.leaves().collect();
    let mut per_class = vec![0usize; ds.n_classes()];
    for leaf in &leaves {
        let mut best = 0;
        for (k, p) in leaf.value.iter().enumerate() {
            if *p > leaf.value[best] {
                best = k;
            }
        }
        per_class[best] += 1;
    }
    let n_leaves = leaves.len() as f64;
    vec![
        scalar("nodes", tree.n_nodes() as f64),
        scalar("leaves", n_leaves),
        scalar("tree_depth", tree.depth() as f64),
        scalar("nodes_per_attr", tree.n_nodes() as f64 / ds.n_features() as f64),
        (
            "leaves_per_class".into(),
            per_class.iter().map(|&c| c as f64 / n_leaves).collect(),
        ),
        ("leaf_depth".into(), leaves.iter().map(|l| l.depth as f64).collect()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn get(m: &Measures, name: &str) -> Vec<f64> {
        m.iter().find(|(n, _)| n == name).unwrap().1.clone()
    }

    #[test]
    fn pure_root() {
        let x = Array2::from_shape_fn((10, 2), |(i, j)| (i * j) as f64);
        let ds = Dataset::from_numeric("p", x, vec![0; 10]).unwrap();
        let m = extract_model_based(&ds);
        assert_eq!(get(&m, "nodes"), vec![1.0]);
        assert_eq!(get(&m, "leaves"), vec![1.0]);
        assert_eq!(get(&m, "tree_depth"), vec![0.0]);
    }

    #[test]
    fn xor_needs_depth_two() {
        let mut x = Array2::zeros((40, 2));
        let mut labels = Vec::new();
        for i in 0..40 {
            let (a, b) = ((i % 2) as f64, ((i / 2) % 2) as f64);
            let jitter = (i / 4) as f64 * 0.01;
            x[(i, 0)] = a + jitter;
            x[(i, 1)] = b - jitter;
            labels.push((i % 2) ^ ((i / 2) % 2));
        }
        let ds = Dataset::from_numeric("xor", x, labels).unwrap();
        assert!(get(&extract_model_based(&ds), "tree_depth")[0] >= 2.0);
    }

    #[test]
    fn separable_every_class_owns_a_leaf() {
        let x = Array2::from_shape_fn((20, 1), |(i, _)| i as f64);
        let labels = (0..20).map(|i| usize::from(i >= 10)).collect();
        let ds = Dataset::from_numeric("s", x, labels).unwrap();
        let m = extract_model_based(&ds);
        assert!(get(&m, "leaves")[0] >= 2.0);
        assert!(get(&m, "leaves_per_class").iter().all(|f| *f > 0.0));
    }
}
