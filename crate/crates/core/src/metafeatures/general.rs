use super::{scalar, Measures};
use crate::ingest::Dataset;

pub fn extract_general(ds: &Dataset) -> Measures {
    let n = ds.n_instances() as f64;
    let d = ds.n_features() as f64;
    let n_cat = ds.n_categorical();
    vec![
        scalar("nr_inst", n),
        scalar("nr_attr", d),
        scalar("nr_class", ds.n_classes() as f64),
        scalar("nr_numeric", (ds.n_features() - n_cat) as f64),
        scalar("nr_categorical", n_cat as f64),
        scalar("attr_to_inst", d / n),
        scalar("inst_to_attr", n / d),
        (
            "freq_class".to_string(),
            ds.class_counts().iter().map(|&c| c as f64 / n).collect(),
        ),
    ]
}
