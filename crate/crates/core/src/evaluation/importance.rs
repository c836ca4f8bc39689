use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::experiment::ExperimentConfig;
use crate::abstractnet::{self, extract_latent, LatentMatrix, NetConfig};
use crate::base_eval::BaseLearnerKind;
use crate::metadb::{MetaDatabase, Scaler};
use crate::metamodels::{build_feature_matrix, fit, gini_importance, FeatureSetting, RegressorKind, RegressorParams};
use crate::rng::derive_seed;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub name: String,
    pub score: f64,
    pub is_abstract: bool,
}

/// Importance is variance-based impurity decrease; the report keeps the
/// conventional "Gini" label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub target: BaseLearnerKind,
    pub label: String,
    pub top: Vec<RankedFeature>,
    pub abstract_count: usize,
    pub degenerate: bool,
}

/// Fits a random forest per target on `[traditional | latent]` and ranks
/// the columns; ties keep column order.
pub fn importance_report(
    traditional: ArrayView2<f64>,
    traditional_names: &[String],
    latent: &LatentMatrix,
    y: ArrayView2<f64>,
    params: &RegressorParams,
    top_k: usize,
    seed: u64,
) -> Result<Vec<ImportanceReport>> {
    if traditional_names.len() != traditional.ncols() {
        return Err(Error::Shape("feature names do not match columns".into()));
    }
    let hybrid = build_feature_matrix(traditional, Some(latent), None, FeatureSetting::Hybrid)?;
    let mut names = traditional_names.to_vec();
    names.extend(latent.column_names());
    let n_trad = traditional.ncols();
    BaseLearnerKind::ALL
        .iter()
        .map(|&target| {
            let model = fit(
                RegressorKind::Rf,
                hybrid.view(),
                y.column(target.index()),
                params,
                derive_seed(seed, &[target.index() as u64]),
            )?;
            let imp = gini_importance(&model)?;
            let mut order: Vec<usize> = (0..names.len()).collect();
            order.sort_by(|&a, &b| imp.scores[b].total_cmp(&imp.scores[a]).then(a.cmp(&b)));
            let top: Vec<RankedFeature> = order
                .iter()
                .take(top_k)
                .map(|&j| RankedFeature {
                    name: names[j].clone(),
                    score: imp.scores[j],
                    is_abstract: j >= n_trad,
                })
                .collect();
            Ok(ImportanceReport {
                target,
                label: "gini".into(),
                abstract_count: top.iter().filter(|f| f.is_abstract).count(),
                top,
                degenerate: imp.degenerate,
            })
        })
        .collect()
}

/// Trains the network on every meta-instance and reports Hybrid importances.
pub fn full_data_importance(db: &MetaDatabase, cfg: &ExperimentConfig, top_k: usize) -> Result<Vec<ImportanceReport>> {
    let scaler = Scaler::fit(db.x.view());
    let z = scaler.transform(db.x.view());
    let seed = derive_seed(cfg.plan.master_seed, &[0x0069_6d70]);
    let net_cfg = NetConfig {
        seed: derive_seed(seed, &[1]),
        ..cfg.net.clone()
    };
    let mut net = abstractnet::init(&net_cfg, z.ncols())?;
    abstractnet::train(&mut net, z.view(), db.y.view(), &net_cfg)?;
    let latent = extract_latent(&net, z.view())?;
    importance_report(z.view(), &db.feature_names, &latent, db.y.view(), &cfg.regressors, top_k, seed)
}
