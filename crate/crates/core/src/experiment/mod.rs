//! Desk-scale reproduction of the ROC experiment pipeline: CSV ingestion with
//! centering/normalization, seeded mini-batch SGD on small ReLU networks, and
//! the models × examples × thresholds sweep emitting one ROC curve bundle per
//! (attribution method, end-task).
//!
//! The sweep is deterministic for a fixed master seed: every randomized cell
//! (model training, example sampling, per-cell attribution) draws from a seed
//! derived from the master and the cell index, so outputs are byte-identical
//! across runs and independent of the parallelism degree.

mod dataset;
mod sweep;
mod synthetic;
mod train;

pub use dataset::{ingest_csv, CsvSchema, Dataset, FeatureStats, TargetKind, Targets};
pub use sweep::{run_sweep, EndTask, ExperimentConfig, SweepCurveSet, SweepOutput};
pub use synthetic::{additive_synthetic, spurious_synthetic, two_class_synthetic};
pub use train::{evaluate_metrics, train_mlp, Loss, Metrics, TrainConfig, TrainReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("csv error: {0}")]
    Csv(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("missing value at row {row}, column '{column}'")]
    MissingValue { row: usize, column: String },
    #[error("cannot parse '{value}' at row {row}, column '{column}' as a number")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },
    #[error("training diverged: loss is not finite at epoch {epoch}")]
    Divergence { epoch: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Attribution(#[from] crate::attribution::AttributionError),
    #[error(transparent)]
    Hyptest(#[from] crate::hyptest::HyptestError),
    #[error(transparent)]
    Forge(#[from] crate::forge::ForgeError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
