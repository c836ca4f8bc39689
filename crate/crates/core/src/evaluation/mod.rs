//! Repeated k-fold comparison of feature settings and meta-inducers, with
//! RMSE / R² tables, impurity-importance reports and a Bayesian correlated
//! t-test over paired fold differences.

mod bayes;
mod bundle;
mod experiment;
mod importance;
mod metrics;

pub use bayes::{
    bayes_correlated_ttest, paired_differences, standard_comparisons, BayesComparison, BayesResult, Metric, DEFAULT_ROPE,
    STANDARD_PAIRS,
};
pub use bundle::{read_metrics_csv, write_metrics_csv, write_run_bundle, RunBundle};
pub use experiment::{
    fit_cell, kfold_indices, run_experiment, score_cell, CellFailure, CvPlan, ExperimentConfig, FittedCell, MetricRow,
    MetricTable,
};
pub use importance::{full_data_importance, importance_report, ImportanceReport, RankedFeature};
pub use metrics::{r2, rmse, summarize_table, SummaryRow};
