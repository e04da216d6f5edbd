//! Desk-scale benchmark: synthetic ordinal data with adjacent-class label
//! noise, a linear softmax classifier trained under each label encoding,
//! multi-seed runs with `(lambda, eta)` grid selection, and Welch t-tests
//! between encodings.

mod data;
mod experiment;
mod model;
mod stats;

pub use data::{generate, stratified_split, SyntheticDataset};
pub use experiment::{
    derive_seeds, run_experiment, run_seed, split_train_test, summarize, ComparisonEntry, Encoding, EncodingSummary,
    ExperimentConfig, MeanSd, RunResult, Summary, TrainTestSplit,
};
pub use model::{batch_loss_and_grad, train_linear, EpochStats, LinearModel, TrainedModel, VALIDATION_FRACTION};
pub use stats::{compare_runs, Comparison, SIGNIFICANCE_LEVEL};
