//! Deterministic synthetic benchmark analogs.
//!
//! The presets imitate the record/field shapes of the public benchmarks at
//! desk scale; labels come from a few planted fields so trained trees stay
//! compact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::{RawColumn, RawTable};
use super::schema::FieldSchema;

const NUMERIC_MISSING_RATE: f64 = 0.01;
const CATEGORICAL_ABSENT_RATE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelModel {
    LinearThreshold,
    NoisyTree,
}

/// Shape of a synthetic table; output is deterministic per seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_records: usize,
    pub numeric_fields: usize,
    /// Category counts, one per categorical field.
    pub categorical_fields: Vec<u32>,
    pub label_model: LabelModel,
    /// Lopsidedness of category distributions in [0, 1]: the first category
    /// of each categorical field gets probability `skew`.
    pub skew: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn all_numeric(n_records: usize, numeric_fields: usize, seed: u64) -> Self {
        SynthSpec {
            n_records,
            numeric_fields,
            categorical_fields: Vec::new(),
            label_model: LabelModel::LinearThreshold,
            skew: 0.0,
            seed,
        }
    }

    /// 28 numeric fields (exotic-particle shape).
    pub fn higgs_analog(n_records: usize, seed: u64) -> Self {
        Self::all_numeric(n_records, 28, seed)
    }

    /// 115 numeric fields (botnet-detection shape).
    pub fn iot_analog(n_records: usize, seed: u64) -> Self {
        Self::all_numeric(n_records, 115, seed)
    }

    /// 46 numeric fields (ranking shape).
    pub fn mq2008_analog(n_records: usize, seed: u64) -> Self {
        Self::all_numeric(n_records, 46, seed)
    }

    /// 32 fields of which 16 categorical; one-hot features ~ 4016.
    pub fn allstate_analog(n_records: usize, seed: u64) -> Self {
        SynthSpec {
            n_records,
            numeric_fields: 16,
            categorical_fields: vec![250; 16],
            label_model: LabelModel::LinearThreshold,
            skew: 0.9,
            seed,
        }
    }

    /// 8 fields of which 7 categorical; one-hot features ~ 666.
    pub fn flight_analog(n_records: usize, seed: u64) -> Self {
        SynthSpec {
            n_records,
            numeric_fields: 1,
            categorical_fields: vec![95, 95, 95, 95, 95, 95, 95],
            label_model: LabelModel::LinearThreshold,
            skew: 0.99,
            seed,
        }
    }

    pub fn n_fields(&self) -> usize {
        self.numeric_fields + self.categorical_fields.len()
    }

    /// Field schemas matching the generated table (numeric first).
    pub fn schemas(&self, max_bins: u32) -> Vec<FieldSchema> {
        let mut out = Vec::with_capacity(self.n_fields());
        for f in 0..self.numeric_fields {
            out.push(FieldSchema::numeric(f as u32, max_bins));
        }
        for (k, &c) in self.categorical_fields.iter().enumerate() {
            out.push(FieldSchema::categorical((self.numeric_fields + k) as u32, c));
        }
        out
    }
}

/// Generate the raw table for `spec`. Labels depend on the first few numeric
/// fields and on whether each categorical field holds its majority category,
/// so skewed categories produce the lopsided first splits seen on the
/// categorical benchmarks.
pub fn synth_dataset(spec: &SynthSpec) -> RawTable {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_records;

    let mut numeric: Vec<Vec<Option<f64>>> =
        (0..spec.numeric_fields).map(|_| Vec::with_capacity(n)).collect();
    let mut categorical: Vec<Vec<Option<u32>>> =
        (0..spec.categorical_fields.len()).map(|_| Vec::with_capacity(n)).collect();
    let mut labels = Vec::with_capacity(n);

    let planted = spec.numeric_fields.min(3);
    // fixed weights for the planted numeric fields
    let weights = [1.0, -0.7, 0.4];

    for _ in 0..n {
        let mut score = 0.0;
        for (f, col) in numeric.iter_mut().enumerate() {
            let missing = rng.gen::<f64>() < NUMERIC_MISSING_RATE;
            if missing {
                col.push(None);
            } else {
                let v = rng.gen::<f64>();
                if f < planted {
                    score += weights[f] * v;
                }
                col.push(Some(v));
            }
        }
        for (k, col) in categorical.iter_mut().enumerate() {
            let n_cat = spec.categorical_fields[k];
            let absent = rng.gen::<f64>() < CATEGORICAL_ABSENT_RATE;
            if absent {
                col.push(None);
                continue;
            }
            let c = if spec.skew > 0.0 && rng.gen::<f64>() < spec.skew {
                0
            } else if n_cat > 1 {
                1 + rng.gen_range(0..n_cat - 1)
            } else {
                0
            };
            // minority categories shift the label so the root split lands on
            // the skewed field
            if c != 0 {
                score += 2.0 + (c % 7) as f64 * 0.1;
            }
            col.push(Some(c));
        }
        let y = match spec.label_model {
            LabelModel::LinearThreshold => score + 0.01 * rng.gen::<f64>(),
            LabelModel::NoisyTree => {
                let t = if score > 0.35 { 1.0 } else { 0.0 };
                if rng.gen::<f64>() < 0.05 {
                    1.0 - t
                } else {
                    t
                }
            }
        };
        labels.push(y);
    }

    let mut columns = Vec::with_capacity(spec.n_fields());
    let mut names = Vec::with_capacity(spec.n_fields());
    for (f, col) in numeric.into_iter().enumerate() {
        columns.push(RawColumn::Numeric(col));
        names.push(format!("num{f}"));
    }
    for (k, col) in categorical.into_iter().enumerate() {
        columns.push(RawColumn::Categorical(col));
        names.push(format!("cat{k}"));
    }
    RawTable { columns, labels, names }
}
