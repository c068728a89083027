//! Field schemas and quantile bin maps.

use serde::{Deserialize, Serialize};

use super::DataError;

/// Hard cap on value bins per field: bin indices are stored in one byte and
/// the last index is reserved for the missing/absent bin.
pub const MAX_VALUE_BINS: usize = 255;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    Numeric,
    Categorical,
}

/// Per-field description of how raw values become bin indices.
///
/// Numeric fields carry `n_bins` = value bins + 1 missing bin (missing is the
/// last index). Categorical fields carry `n_categories` + 1 absent bin.
/// `start_feature` is the first global one-hot feature index of the field;
/// the one-hot expansion is bookkeeping only, storage stays one byte per field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSchema {
    pub field_id: u32,
    pub kind: FieldKind,
    /// Categorical only; 0 for numerics.
    pub n_categories: u32,
    /// Numeric only; declared bin budget including the missing bin.
    pub max_bins: u32,
    pub start_feature: u32,
    /// Actual bins in use, including the missing/absent bin.
    pub n_bins: u32,
}

impl FieldSchema {
    pub fn numeric(field_id: u32, max_bins: u32) -> Self {
        FieldSchema {
            field_id,
            kind: FieldKind::Numeric,
            n_categories: 0,
            max_bins,
            start_feature: 0,
            n_bins: max_bins,
        }
    }

    pub fn categorical(field_id: u32, n_categories: u32) -> Self {
        FieldSchema {
            field_id,
            kind: FieldKind::Categorical,
            n_categories,
            max_bins: 0,
            start_feature: 0,
            n_bins: n_categories + 1,
        }
    }

    /// Index of the missing (numeric) or absent (categorical) bin.
    pub fn missing_bin(&self) -> u8 {
        (self.n_bins - 1) as u8
    }

    /// Number of one-hot features this field contributes: one per category
    /// for categoricals, one for a numeric field.
    pub fn n_features(&self) -> u32 {
        match self.kind {
            FieldKind::Numeric => 1,
            FieldKind::Categorical => self.n_categories,
        }
    }
}

/// Assign contiguous `start_feature` offsets across `schemas` in field order.
pub fn assign_start_features(schemas: &mut [FieldSchema]) {
    let mut next = 0u32;
    for s in schemas.iter_mut() {
        s.start_feature = next;
        next += s.n_features();
    }
}

/// Quantile discretization of one numeric field.
///
/// `upper_boundaries[i]` is the inclusive upper bound of value bin `i`; the
/// last value bin is unbounded above. Missing values map to `missing_bin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinMap {
    pub field_id: u32,
    pub upper_boundaries: Vec<f64>,
    pub missing_bin: u8,
}

impl BinMap {
    /// Number of value bins (excluding the missing bin).
    pub fn n_value_bins(&self) -> usize {
        self.upper_boundaries.len() + 1
    }

    /// Total mapping: every finite value and the missing case land in
    /// exactly one bin.
    pub fn bin_of(&self, value: Option<f64>) -> u8 {
        match value {
            None => self.missing_bin,
            Some(v) => {
                // first boundary >= v; the last value bin catches the rest
                let idx = self.upper_boundaries.partition_point(|&b| b < v);
                idx as u8
            }
        }
    }
}

/// Build a quantile bin map from the raw values of one field.
///
/// Boundaries are exact quantiles of the sorted non-missing values, deduped.
/// At most `max_bins - 1` value bins; the missing bin is always the last
/// index. An all-missing field yields zero boundaries (one value bin that
/// never receives a value) and is reported via the returned flag.
pub fn build_bin_map(
    field_id: u32,
    values: &[Option<f64>],
    max_bins: usize,
) -> Result<(BinMap, bool), DataError> {
    if max_bins < 2 {
        return Err(DataError::InvalidSchema {
            field_id,
            reason: format!("max_bins must be >= 2, got {max_bins}"),
        });
    }
    if max_bins > MAX_VALUE_BINS + 1 {
        return Err(DataError::InvalidSchema {
            field_id,
            reason: format!(
                "max_bins {max_bins} exceeds the byte-index cap of {} value bins",
                MAX_VALUE_BINS
            ),
        });
    }
    let mut sorted: Vec<f64> = values.iter().filter_map(|v| *v).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sorted.is_empty() {
        let map = BinMap {
            field_id,
            upper_boundaries: Vec::new(),
            missing_bin: 1,
        };
        return Ok((map, true));
    }
    let n = sorted.len();
    let n_value_bins = max_bins - 1;
    let mut boundaries = Vec::with_capacity(n_value_bins.saturating_sub(1));
    for k in 1..n_value_bins {
        // upper boundary of bin k-1 at the k/n_value_bins quantile
        let pos = (k * n) / n_value_bins;
        let b = sorted[pos.saturating_sub(1).min(n - 1)];
        if boundaries.last().map_or(true, |&last| b > last) && b < sorted[n - 1] {
            boundaries.push(b);
        }
    }
    let missing_bin = (boundaries.len() + 1) as u8;
    Ok((
        BinMap {
            field_id,
            upper_boundaries: boundaries,
            missing_bin,
        },
        false,
    ))
}
