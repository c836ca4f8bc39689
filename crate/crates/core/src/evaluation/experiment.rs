use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{r2, rmse};
use crate::abstractnet::{self, extract_latent, Mlp, NetConfig};
use crate::base_eval::BaseLearnerKind;
use crate::metadb::{MetaDatabase, Scaler};
use crate::metamodels::{build_feature_matrix, fit, pca_fit, FeatureSetting, PcaModel, RegressorKind, RegressorModel, RegressorParams};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvPlan {
    pub folds: usize,
    pub repeats: usize,
    pub master_seed: u64,
}

impl Default for CvPlan {
    fn default() -> Self {
        CvPlan {
            folds: 10,
            repeats: 10,
            master_seed: 0,
        }
    }
}

impl CvPlan {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 || self.repeats < 1 {
            return Err(Error::Config(format!(
                "CV plan needs folds >= 2 and repeats >= 1, got {}x{}",
                self.repeats, self.folds
            )));
        }
        Ok(())
    }

    /// Seed for the fold assignment of one repeat.
    pub fn repeat_seed(&self, repeat: usize) -> u64 {
        derive_seed(self.master_seed, &[repeat as u64])
    }

    /// Seed for everything fitted inside one (repeat, fold) cell.
    pub fn cell_seed(&self, repeat: usize, fold: usize) -> u64 {
        derive_seed(self.master_seed, &[repeat as u64, fold as u64])
    }
}

/// Seeded shuffle, then `k` contiguous chunks; the first `n % k` chunks
/// get one extra index.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || n < k {
        return Err(Error::invalid(format!("cannot split {n} rows into {k} folds")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_from_seed(seed));
    let (base, extra) = (n / k, n % k);
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        out.push(idx[start..start + len].to_vec());
        start += len;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub plan: CvPlan,
    pub net: NetConfig,
    pub regressors: RegressorParams,
    pub settings: Vec<FeatureSetting>,
    pub inducers: Vec<RegressorKind>,
    pub pca_variance: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            plan: CvPlan::default(),
            net: NetConfig::default(),
            regressors: RegressorParams::default(),
            settings: FeatureSetting::ALL.to_vec(),
            inducers: RegressorKind::ALL.to_vec(),
            pca_variance: 0.95,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.plan.validate()?;
        self.net.validate()?;
        if self.settings.is_empty() || self.inducers.is_empty() {
            return Err(Error::Config("at least one feature setting and one inducer are required".into()));
        }
        if !(self.pca_variance > 0.0 && self.pca_variance <= 1.0) {
            return Err(Error::Config(format!("pca_variance {} not in (0, 1]", self.pca_variance)));
        }
        Ok(())
    }

    fn needs_latent(&self) -> bool {
        self.settings
            .iter()
            .any(|s| matches!(s, FeatureSetting::Abstract | FeatureSetting::Hybrid))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub repeat: usize,
    pub fold: usize,
    pub setting: FeatureSetting,
    pub inducer: RegressorKind,
    pub target: BaseLearnerKind,
    pub rmse: f64,
    /// Undefined when the held-out targets are constant.
    pub r2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub repeat: usize,
    pub fold: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    pub rows: Vec<MetricRow>,
    pub failures: Vec<CellFailure>,
}

/// Everything fitted on one training split.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedCell {
    pub scaler: Scaler,
    pub net: Option<Mlp>,
    pub pca: Option<PcaModel>,
    /// `(setting, inducer, target)` in configuration order.
    pub models: Vec<((FeatureSetting, RegressorKind, BaseLearnerKind), RegressorModel)>,
}

impl FittedCell {
    fn features(&self, x: ArrayView2<f64>, setting: FeatureSetting) -> Result<Array2<f64>> {
        let z = self.scaler.transform(x);
        let latent = match (&self.net, setting) {
            (Some(net), FeatureSetting::Abstract | FeatureSetting::Hybrid) => Some(extract_latent(net, z.view())?),
            _ => None,
        };
        build_feature_matrix(z.view(), latent.as_ref(), self.pca.as_ref(), setting)
    }
}

/// Fits scaler, network, PCA and every inducer on the training rows only.
pub fn fit_cell(x_train: ArrayView2<f64>, y_train: ArrayView2<f64>, cfg: &ExperimentConfig, seed: u64) -> Result<FittedCell> {
    let scaler = Scaler::fit(x_train);
    let z = scaler.transform(x_train);
    let net = if cfg.needs_latent() {
        let net_cfg = NetConfig {
            seed: derive_seed(seed, &[1]),
            ..cfg.net.clone()
        };
        let mut net = abstractnet::init(&net_cfg, z.ncols())?;
        abstractnet::train(&mut net, z.view(), y_train, &net_cfg)?;
        Some(net)
    } else {
        None
    };
    let pca = if cfg.settings.contains(&FeatureSetting::Pca) {
        Some(pca_fit(z.view(), cfg.pca_variance)?)
    } else {
        None
    };
    let mut cell = FittedCell {
        scaler,
        net,
        pca,
        models: Vec::new(),
    };
    for (s, &setting) in cfg.settings.iter().enumerate() {
        let x = cell.features(x_train, setting)?;
        for (i, &inducer) in cfg.inducers.iter().enumerate() {
            for target in BaseLearnerKind::ALL {
                let t = target.index();
                let model_seed = derive_seed(seed, &[2, s as u64, i as u64, t as u64]);
                let model = fit(inducer, x.view(), y_train.column(t), &cfg.regressors, model_seed)?;
                cell.models.push(((setting, inducer, target), model));
            }
        }
    }
    Ok(cell)
}

/// RMSE and R² of every fitted model on the held-out rows.
pub fn score_cell(cell: &FittedCell, x_test: ArrayView2<f64>, y_test: ArrayView2<f64>, repeat: usize, fold: usize) -> Result<Vec<MetricRow>> {
    let mut rows = Vec::with_capacity(cell.models.len());
    let mut current: Option<(FeatureSetting, Array2<f64>)> = None;
    for ((setting, inducer, target), model) in &cell.models {
        if current.as_ref().is_none_or(|(s, _)| s != setting) {
            current = Some((*setting, cell.features(x_test, *setting)?));
        }
        let x = &current.as_ref().expect("set above").1;
        let pred = model.predict(x.view())?.to_vec();
        let truth = y_test.column(target.index()).to_vec();
        rows.push(MetricRow {
            repeat,
            fold,
            setting: *setting,
            inducer: *inducer,
            target: *target,
            rmse: rmse(&pred, &truth),
            r2: r2(&pred, &truth),
        });
    }
    Ok(rows)
}

/// Train/test row indices of every `(repeat, fold)` cell.
pub(crate) fn cells(n: usize, plan: &CvPlan) -> Result<Vec<(usize, usize, Vec<usize>, Vec<usize>)>> {
    let mut out = Vec::new();
    for repeat in 0..plan.repeats {
        let folds = kfold_indices(n, plan.folds, plan.repeat_seed(repeat))?;
        for (fold, test) in folds.iter().enumerate() {
            let mut in_test = vec![false; n];
            test.iter().for_each(|&i| in_test[i] = true);
            let train: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
            let mut test = test.clone();
            test.sort_unstable();
            out.push((repeat, fold, train, test));
        }
    }
    Ok(out)
}

/// Runs every `(repeat, fold)` cell. Cells are independent; rows come back in
/// `(repeat, fold, setting, inducer, target)` order whatever the scheduling.
pub fn run_experiment(db: &MetaDatabase, cfg: &ExperimentConfig) -> Result<MetricTable> {
    cfg.validate()?;
    db.check()?;
    if db.has_missing() || db.y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("meta-database must be fully preprocessed (no missing values)"));
    }
    let all = cells(db.n_rows(), &cfg.plan)?;
    let results: Vec<(usize, usize, Result<Vec<MetricRow>>)> = all
        .par_iter()
        .map(|(repeat, fold, train, test)| {
            let x_train = db.x.select(Axis(0), train);
            let y_train = db.y.select(Axis(0), train);
            let x_test = db.x.select(Axis(0), test);
            let y_test = db.y.select(Axis(0), test);
            let seed = cfg.plan.cell_seed(*repeat, *fold);
            let result = fit_cell(x_train.view(), y_train.view(), cfg, seed)
                .and_then(|cell| score_cell(&cell, x_test.view(), y_test.view(), *repeat, *fold));
            log::info!("cell repeat={repeat} fold={fold} done");
            (*repeat, *fold, result)
        })
        .collect();
    let mut table = MetricTable {
        rows: Vec::new(),
        failures: Vec::new(),
    };
    for (repeat, fold, result) in results {
        match result {
            Ok(rows) => table.rows.extend(rows),
            Err(e) => {
                log::warn!("cell repeat={repeat} fold={fold} failed: {e}");
                table.failures.push(CellFailure {
                    repeat,
                    fold,
                    message: e.to_string(),
                });
            }
        }
    }
    if table.rows.is_empty() {
        let first = table.failures.first().map(|f| f.message.clone()).unwrap_or_default();
        return Err(Error::invalid(format!("every CV cell failed; first error: {first}")));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metadb::target_names;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    #[test]
    fn fold_sizes() {
        let f = kfold_indices(10, 10, 0).unwrap();
        assert!(f.iter().all(|s| s.len() == 1));
        let f = kfold_indices(11, 10, 0).unwrap();
        let mut sizes: Vec<usize> = f.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, [1, 1, 1, 1, 1, 1, 1, 1, 1, 2]);
        assert_eq!(kfold_indices(11, 10, 4).unwrap(), kfold_indices(11, 10, 4).unwrap());
        assert!(kfold_indices(3, 10, 0).is_err());
    }

    pub(crate) fn small_db(n: usize, d: usize, seed: u64) -> MetaDatabase {
        let mut rng = rng_from_seed(seed);
        let x = Array2::from_shape_simple_fn((n, d), || rng.random::<f64>());
        let mut y = Array2::zeros((n, 3));
        for i in 0..n {
            for t in 0..3 {
                y[(i, t)] = 0.5 + 0.3 * (x[(i, t)] * 3.0).sin() + 0.02 * rng.random::<f64>();
            }
        }
        MetaDatabase {
            instance_names: (0..n).map(|i| format!("d{i}")).collect(),
            feature_names: (0..d).map(|j| format!("f{j}")).collect(),
            x,
            y,
            target_names: target_names(),
            provenance: vec![],
        }
    }

    fn quick_cfg(repeats: usize, folds: usize) -> ExperimentConfig {
        ExperimentConfig {
            plan: CvPlan {
                folds,
                repeats,
                master_seed: 3,
            },
            net: NetConfig {
                epochs: 5,
                ..NetConfig::default()
            },
            regressors: RegressorParams {
                n_trees: 5,
                svr: crate::metamodels::SvrParams {
                    epochs: 5,
                    ..Default::default()
                },
                ..RegressorParams::default()
            },
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn row_count() {
        let db = small_db(40, 6, 1);
        let table = run_experiment(&db, &quick_cfg(2, 10)).unwrap();
        assert_eq!(table.rows.len(), 720);
        assert!(table.failures.is_empty());
        assert!(table.rows.iter().all(|r| r.rmse >= 0.0 && r.r2.is_none_or(|v| v <= 1.0)));
    }

    #[test]
    fn each_instance_tested_once_per_repeat() {
        let plan = CvPlan {
            folds: 10,
            repeats: 3,
            master_seed: 9,
        };
        let all = cells(57, &plan).unwrap();
        for repeat in 0..3 {
            let mut seen = vec![0; 57];
            for (_, _, train, test) in all.iter().filter(|c| c.0 == repeat) {
                test.iter().for_each(|&i| seen[i] += 1);
                assert_eq!(train.len() + test.len(), 57);
            }
            assert!(seen.iter().all(|c| *c == 1));
        }
    }

    #[test]
    fn corrupted_test_targets_do_not_leak() {
        let db = small_db(60, 5, 2);
        let cfg = quick_cfg(1, 10);
        let (_, _, train, test) = cells(60, &cfg.plan).unwrap().remove(0);
        let fit_on = |y: &Array2<f64>| {
            fit_cell(
                db.x.select(Axis(0), &train).view(),
                y.select(Axis(0), &train).view(),
                &cfg,
                cfg.plan.cell_seed(0, 0),
            )
            .unwrap()
        };
        let clean = fit_on(&db.y);
        let mut corrupted = db.y.clone();
        for &i in &test {
            corrupted.row_mut(i).fill(1e6);
        }
        let dirty = fit_on(&corrupted);
        assert!(clean == dirty);
        let x_test = db.x.select(Axis(0), &test);
        let a = score_cell(&clean, x_test.view(), db.y.select(Axis(0), &test).view(), 0, 0).unwrap();
        let b = score_cell(&dirty, x_test.view(), corrupted.select(Axis(0), &test).view(), 0, 0).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn deterministic_and_repeat_independent() {
        let db = small_db(30, 4, 5);
        let mut cfg = quick_cfg(2, 5);
        cfg.settings = vec![FeatureSetting::Traditional, FeatureSetting::Pca];
        let a = run_experiment(&db, &cfg).unwrap();
        assert_eq!(a, run_experiment(&db, &cfg).unwrap());
        cfg.plan.repeats = 1;
        let one = run_experiment(&db, &cfg).unwrap();
        let shared: Vec<_> = a.rows.iter().filter(|r| r.repeat == 0).cloned().collect();
        assert_eq!(one.rows, shared);
    }
}
