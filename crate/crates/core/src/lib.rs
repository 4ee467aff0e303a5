//! Lazy classification with local conjunctive rules.
//!
//! For each point to classify, the training rows are encoded as match
//! vectors against that point, every admissible conjunction of matches is
//! found by a pruned exhaustive search, and the accepted rules vote through
//! a single combined rule over the union of their match sets.

pub mod bits;
pub mod dataset;
pub mod discretize;
pub mod encode;
pub mod error;
pub mod evaluate;
pub mod oracle;
pub mod predict;
pub mod rule;
pub mod search;
pub mod selftest;

pub use bits::BitSet;
pub use dataset::{parse_dataset, split_for_prediction, Dataset, PredictionPoint, Schema, TrainingRows, Value};
pub use encode::{encode, EncodedInstance, EncodingConfig, EncodingMode, Grids};
pub use error::{Error, Result};
pub use evaluate::{evaluate_cv, evaluate_loocv, evaluate_train_test, stratified_kfold, EvaluationReport, Settings};
pub use oracle::exhaustive_rules;
pub use predict::{combine, predict, Prediction, PredictionSource};
pub use rule::{QualityParams, Rule};
pub use search::{node_visit_count, search_local_rules, AcceptedRuleSet};
