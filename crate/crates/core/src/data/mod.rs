//! Tabular ingestion, quantile binning, and the dual-layout quantized
//! dataset.

pub mod dataset;
pub mod io;
pub mod schema;
pub mod synth;

pub use dataset::{
    quantize_dataset, quantize_from_raw, record_stride_for, QuantizedDataset, RawColumn, RawTable,
    BLOCK_BYTES,
};
pub use io::{deserialize_dataset, read_csv, serialize_dataset, write_csv};
pub use schema::{assign_start_features, build_bin_map, BinMap, FieldKind, FieldSchema};
pub use synth::{synth_dataset, LabelModel, SynthSpec};

/// Default bin budget for numeric fields (255 value bins + missing).
pub const DEFAULT_MAX_BINS: u32 = 256;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("field {field_id}: {reason}")]
    InvalidSchema { field_id: u32, reason: String },
    #[error("field {field_id}, record {record}: categorical value {value} >= {n_categories}")]
    CategoryOutOfRange {
        field_id: u32,
        record: usize,
        value: u32,
        n_categories: u32,
    },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("bad magic: not a BSTRDSv1 dataset file")]
    BadMagic,
    #[error("dataset file truncated")]
    Truncated,
    #[error("dataset file checksum mismatch")]
    ChecksumMismatch,
    #[error("corrupt dataset file: {0}")]
    Corrupt(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
