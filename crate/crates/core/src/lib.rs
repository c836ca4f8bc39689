//! Dataset characterization and abstract meta-feature learning.
//!
//! The crate follows a three-phase pipeline:
//!
//! 1. **Characterization** ([`ingest`], [`metafeatures`], [`base_eval`]): load
//!    classification datasets, compute traditional meta-features and record the
//!    generalization AUC of three base learners.
//! 2. **Meta-database** ([`metadb`]): stack vectors and targets, prune, drop
//!    correlated columns and impute the rest with k-NN.
//! 3. **Evaluation** ([`abstractnet`], [`metamodels`], [`evaluation`]): learn
//!    abstract meta-features as the last hidden layer of a regression network and
//!    compare them against traditional, hybrid and PCA features with repeated
//!    cross-validation and a Bayesian correlated t-test.
//!
//! Missing values are represented as `f64::NAN` throughout (see [`MISSING`]).

pub mod abstractnet;
pub mod base_eval;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod ingest;
pub mod metadb;
pub mod metafeatures;
pub mod metamodels;
pub mod rng;
pub mod stats;
pub mod tree;

pub use error::{Error, Result};

/// Marker for an absent cell or an undefined measure.
pub const MISSING: f64 = f64::NAN;

/// `true` when `v` encodes [`MISSING`].
#[inline]
pub fn is_missing(v: f64) -> bool {
    v.is_nan()
}
