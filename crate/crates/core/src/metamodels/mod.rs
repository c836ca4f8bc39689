//! Meta-regressors, the PCA baseline and the four feature settings.

mod pca;
mod regressors;
mod settings;

pub use pca::{pca_fit, pca_transform, retained_count, PcaModel};
pub use regressors::{
    fit, gini_importance, Fitted, Importance, RegressorKind, RegressorModel, RegressorParams, SvrParams,
};
pub use settings::{build_feature_matrix, build_from_database, FeatureSetting};
