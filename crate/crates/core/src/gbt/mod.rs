//! Histogram-based gradient-boosted tree training and prediction.

pub mod histogram;
pub mod loss;
pub mod split;
pub mod trace;
pub mod train;
pub mod tree;

pub use histogram::{bin_gradients, bin_gradients_seq, subtract_histograms, BinStats, Histogram};
pub use loss::{compute_gradients, GradPair, Loss};
pub use split::{find_best_split, leaf_weight, split_gain, SplitCandidate};
pub use trace::{StepTrace, TreeTrace, VertexTrace, WorkTotals};
pub use train::{grow_tree, partition_records, train, GrowthOrder, TrainConfig, TrainOutput};
pub use tree::{read_model, write_model, Ensemble, Node, Predicate, Tree};

use serde::{Deserialize, Serialize};

/// Which physical record layout an operation reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    RowMajor,
    ColumnMajor,
}

#[derive(Debug, thiserror::Error)]
pub enum GbtError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("record {record}: non-finite prediction {value}")]
    NonFinitePrediction { record: usize, value: f64 },
    #[error("histogram invariant violated: {0}")]
    HistogramInvariant(String),
    #[error("model format: {0}")]
    ModelFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
