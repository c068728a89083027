//! Quantized dataset: row-major blocks plus the redundant per-field columns.

use crate::gbt::GradPair;

use super::schema::{assign_start_features, BinMap, FieldKind, FieldSchema};
use super::DataError;

/// Memory-block size in bytes; records are padded to block granularity,
/// except that records at or under half a block are packed two per block.
pub const BLOCK_BYTES: usize = 64;

/// A raw (pre-quantization) column of one field.
#[derive(Debug, Clone, PartialEq)]
pub enum RawColumn {
    /// Missing values are `None`.
    Numeric(Vec<Option<f64>>),
    /// Category codes; absent values are `None`.
    Categorical(Vec<Option<u32>>),
}

impl RawColumn {
    pub fn len(&self) -> usize {
        match self {
            RawColumn::Numeric(v) => v.len(),
            RawColumn::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Raw tabular input: one column per field plus labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub columns: Vec<RawColumn>,
    pub labels: Vec<f64>,
    /// Column names, parallel to `columns` (used by CSV round-trips).
    pub names: Vec<String>,
}

impl RawTable {
    pub fn n_records(&self) -> usize {
        self.labels.len()
    }
}

/// Binned records in both layouts, with labels and the separate gradient
/// stream. Immutable after construction; safe for concurrent readers.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedDataset {
    pub schema: Vec<FieldSchema>,
    pub bin_maps: Vec<Option<BinMap>>,
    /// Row-major packed bin indices, one byte per field, padded to
    /// `record_stride` and stored back to back.
    pub row_blocks: Vec<u8>,
    /// Redundant per-field column-major layout: `columns[f][r]`.
    pub columns: Vec<Vec<u8>>,
    pub labels: Vec<f64>,
    /// Per-record (g, h); kept separate from the record bytes so the
    /// gradient stream reads and writes stay contiguous.
    pub grad_buffer: Vec<GradPair>,
    n_records: usize,
    record_stride: usize,
}

impl QuantizedDataset {
    pub fn n_records(&self) -> usize {
        self.n_records
    }

    pub fn n_fields(&self) -> usize {
        self.schema.len()
    }

    /// Padded bytes one record occupies in the row-major layout.
    pub fn record_stride(&self) -> usize {
        self.record_stride
    }

    /// Useful (unpadded) bytes per record: one per field.
    pub fn record_bytes(&self) -> usize {
        self.schema.len()
    }

    /// Blocks one record occupies, fractional when two records share a block.
    pub fn blocks_per_record(&self) -> f64 {
        self.record_stride as f64 / BLOCK_BYTES as f64
    }

    #[inline]
    pub fn bin_row_major(&self, record: usize, field: usize) -> u8 {
        self.row_blocks[record * self.record_stride + field]
    }

    #[inline]
    pub fn bin_column_major(&self, record: usize, field: usize) -> u8 {
        self.columns[field][record]
    }

    /// Rebuild the column layout from the row blocks (consistency checks).
    pub fn columns_from_rows(&self) -> Vec<Vec<u8>> {
        (0..self.n_fields())
            .map(|f| (0..self.n_records).map(|r| self.bin_row_major(r, f)).collect())
            .collect()
    }

    /// Replicate every record `factor` times (pure replication, labels
    /// included); gradient state is reset.
    pub fn replicate(&self, factor: usize) -> QuantizedDataset {
        assert!(factor >= 1);
        let n = self.n_records * factor;
        let mut row_blocks = Vec::with_capacity(n * self.record_stride);
        let mut labels = Vec::with_capacity(n);
        for rep in 0..factor {
            let _ = rep;
            row_blocks.extend_from_slice(&self.row_blocks[..self.n_records * self.record_stride]);
            labels.extend_from_slice(&self.labels);
        }
        let columns = self
            .columns
            .iter()
            .map(|c| {
                let mut out = Vec::with_capacity(n);
                for _ in 0..factor {
                    out.extend_from_slice(c);
                }
                out
            })
            .collect();
        QuantizedDataset {
            schema: self.schema.clone(),
            bin_maps: self.bin_maps.clone(),
            row_blocks,
            columns,
            labels,
            grad_buffer: vec![GradPair::default(); n],
            n_records: n,
            record_stride: self.record_stride,
        }
    }
}

impl QuantizedDataset {
    /// Reassemble from already-validated parts (deserialization path).
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        schema: Vec<FieldSchema>,
        bin_maps: Vec<Option<BinMap>>,
        row_blocks: Vec<u8>,
        columns: Vec<Vec<u8>>,
        labels: Vec<f64>,
        grad_buffer: Vec<GradPair>,
        n_records: usize,
        record_stride: usize,
    ) -> QuantizedDataset {
        QuantizedDataset {
            schema,
            bin_maps,
            row_blocks,
            columns,
            labels,
            grad_buffer,
            n_records,
            record_stride,
        }
    }
}

/// Padded record stride for `n_fields` one-byte fields.
pub fn record_stride_for(n_fields: usize) -> usize {
    if n_fields <= BLOCK_BYTES / 2 {
        BLOCK_BYTES / 2
    } else {
        n_fields.div_ceil(BLOCK_BYTES) * BLOCK_BYTES
    }
}

/// Quantize a raw table against schemas and (numeric) bin maps.
///
/// Populates both layouts. Categorical value `c` maps to bin `c`, absent to
/// the extra last bin; numeric values go through their `BinMap`. Bin indices
/// live in one byte, so fields needing more than 256 bins are rejected.
pub fn quantize_dataset(
    raw: &RawTable,
    schemas: &[FieldSchema],
    bin_maps: &[Option<BinMap>],
) -> Result<QuantizedDataset, DataError> {
    let n = raw.n_records();
    if raw.columns.len() != schemas.len() {
        return Err(DataError::Shape(format!(
            "{} raw columns vs {} schema fields",
            raw.columns.len(),
            schemas.len()
        )));
    }
    let mut schema = schemas.to_vec();
    assign_start_features(&mut schema);

    let mut columns: Vec<Vec<u8>> = Vec::with_capacity(schema.len());
    for (f, (col, fs)) in raw.columns.iter().zip(schema.iter()).enumerate() {
        if col.len() != n {
            return Err(DataError::Shape(format!(
                "column {f} has {} rows, expected {n}",
                col.len()
            )));
        }
        if fs.n_bins > 256 {
            return Err(DataError::InvalidSchema {
                field_id: fs.field_id,
                reason: format!("{} bins exceed the 256-bin byte index limit", fs.n_bins),
            });
        }
        let mut out = Vec::with_capacity(n);
        match (col, fs.kind) {
            (RawColumn::Numeric(vals), FieldKind::Numeric) => {
                let map = bin_maps
                    .get(f)
                    .and_then(|m| m.as_ref())
                    .ok_or_else(|| DataError::InvalidSchema {
                        field_id: fs.field_id,
                        reason: "numeric field without a bin map".into(),
                    })?;
                for v in vals {
                    out.push(map.bin_of(*v));
                }
            }
            (RawColumn::Categorical(vals), FieldKind::Categorical) => {
                let absent = fs.missing_bin();
                for (r, v) in vals.iter().enumerate() {
                    match v {
                        None => out.push(absent),
                        Some(c) if *c < fs.n_categories => out.push(*c as u8),
                        Some(c) => {
                            return Err(DataError::CategoryOutOfRange {
                                field_id: fs.field_id,
                                record: r,
                                value: *c,
                                n_categories: fs.n_categories,
                            })
                        }
                    }
                }
            }
            _ => {
                return Err(DataError::InvalidSchema {
                    field_id: fs.field_id,
                    reason: "raw column kind does not match schema kind".into(),
                })
            }
        }
        columns.push(out);
    }

    let stride = record_stride_for(schema.len());
    let mut row_blocks = vec![0u8; n * stride];
    for r in 0..n {
        let base = r * stride;
        for (f, col) in columns.iter().enumerate() {
            row_blocks[base + f] = col[r];
        }
    }

    Ok(QuantizedDataset {
        bin_maps: bin_maps.to_vec(),
        schema,
        row_blocks,
        columns,
        labels: raw.labels.clone(),
        grad_buffer: vec![GradPair::default(); n],
        n_records: n,
        record_stride: stride,
    })
}

/// Build bin maps for every numeric column of `raw` and quantize.
pub fn quantize_from_raw(
    raw: &RawTable,
    schemas: &[FieldSchema],
) -> Result<QuantizedDataset, DataError> {
    let mut maps: Vec<Option<BinMap>> = Vec::with_capacity(schemas.len());
    let mut schemas = schemas.to_vec();
    for (f, fs) in schemas.iter_mut().enumerate() {
        match (&raw.columns[f], fs.kind) {
            (RawColumn::Numeric(vals), FieldKind::Numeric) => {
                let (map, _all_missing) =
                    super::schema::build_bin_map(fs.field_id, vals, fs.max_bins as usize)?;
                fs.n_bins = (map.n_value_bins() + 1) as u32;
                maps.push(Some(map));
            }
            _ => maps.push(None),
        }
    }
    quantize_dataset(raw, &schemas, &maps)
}
