//! Cycle models for the accelerated steps, replaying training traces.
//!
//! Histogram state is replicated one copy per cluster; records are
//! partitioned across clusters and the per-copy reduction runs on the host
//! together with the split search. Fetch latency is hidden by
//! double-buffering, so only pipeline fill terms appear.

use super::dram::{dram_stream_cycles, AccessPattern, DramConfig, DramTransfer};
use crate::arch::{BoosterConfig, MapStrategy};
use crate::data::FieldSchema;
use crate::gbt::{StepTrace, WorkTotals};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct HostModel {
    pub clock_ghz: f64,
    /// Host cycles per histogram bin scanned during split search, covering
    /// the cross-cluster reduction folded into the same pass.
    pub cycles_per_bin: u64,
}

impl Default for HostModel {
    fn default() -> Self {
        HostModel { clock_ghz: 2.2, cycles_per_bin: 40 }
    }
}

/// Occupancy summary of one histogram copy under a mapping strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapProfile {
    pub units_per_copy: usize,
    pub max_fields_per_bu: usize,
}

impl MapProfile {
    pub fn from_schemas(
        schemas: &[FieldSchema],
        strategy: MapStrategy,
        cfg: &BoosterConfig,
    ) -> MapProfile {
        match strategy {
            MapStrategy::GroupByField => {
                let units = schemas
                    .iter()
                    .map(|s| {
                        (s.n_bins as usize * cfg.bin_entry_bytes)
                            .div_ceil(cfg.sram_bytes)
                            .max(1)
                    })
                    .sum();
                MapProfile { units_per_copy: units, max_fields_per_bu: 1 }
            }
            MapStrategy::NaivePack => {
                let mut fields_in_unit = 0usize;
                let mut max_fields = 0usize;
                let mut units = 1usize;
                let mut offset = 0usize;
                for s in schemas {
                    let mut bytes = s.n_bins as usize * cfg.bin_entry_bytes;
                    while bytes > 0 {
                        fields_in_unit += 1;
                        max_fields = max_fields.max(fields_in_unit);
                        let take = bytes.min(cfg.sram_bytes - offset);
                        offset += take;
                        bytes -= take;
                        if offset == cfg.sram_bytes {
                            units += 1;
                            offset = 0;
                            fields_in_unit = 0;
                        }
                    }
                }
                if offset == 0 {
                    units -= 1;
                }
                MapProfile { units_per_copy: units.max(1), max_fields_per_bu: max_fields.max(1) }
            }
        }
    }

    /// Histogram copies that fit on the chip, at most one per cluster.
    pub fn replication(&self, cfg: &BoosterConfig) -> usize {
        (cfg.total_bus() / self.units_per_copy.max(1))
            .min(cfg.n_clusters)
            .max(1)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepBytes {
    pub step1_read: u64,
    pub step3_read: u64,
    pub step3_written: u64,
    pub step5_read: u64,
    pub step5_written: u64,
    pub inference_read: u64,
}

impl StepBytes {
    pub fn total_read(&self) -> u64 {
        self.step1_read + self.step3_read + self.step5_read + self.inference_read
    }

    pub fn total_written(&self) -> u64 {
        self.step3_written + self.step5_written
    }

    pub fn total(&self) -> u64 {
        self.total_read() + self.total_written()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleReport {
    pub platform: String,
    pub clock_ghz: f64,
    pub step1_cycles: f64,
    pub step2_host_cycles: f64,
    pub step3_cycles: f64,
    pub step5_cycles: f64,
    pub inference_cycles: f64,
    pub bytes: StepBytes,
    pub sram_accesses: u64,
    pub dram_row_hits: u64,
    pub dram_row_misses: u64,
    /// Step-1 bandwidth utilizations, in [0, 1].
    pub sram_bw_util: f64,
    pub dram_bw_util: f64,
}

impl CycleReport {
    pub fn empty(platform: &str, clock_ghz: f64) -> CycleReport {
        CycleReport {
            platform: platform.to_string(),
            clock_ghz,
            step1_cycles: 0.0,
            step2_host_cycles: 0.0,
            step3_cycles: 0.0,
            step5_cycles: 0.0,
            inference_cycles: 0.0,
            bytes: StepBytes::default(),
            sram_accesses: 0,
            dram_row_hits: 0,
            dram_row_misses: 0,
            sram_bw_util: 0.0,
            dram_bw_util: 0.0,
        }
    }

    pub fn total_cycles(&self) -> f64 {
        self.step1_cycles
            + self.step2_host_cycles
            + self.step3_cycles
            + self.step5_cycles
            + self.inference_cycles
    }

    pub fn wall_ns(&self) -> f64 {
        self.total_cycles() / self.clock_ghz
    }

    pub fn step_cycles(&self) -> [(&'static str, f64); 5] {
        [
            ("step1", self.step1_cycles),
            ("step2_host", self.step2_host_cycles),
            ("step3", self.step3_cycles),
            ("step5", self.step5_cycles),
            ("inference", self.inference_cycles),
        ]
    }
}

/// SRAM touches implied by a training trace: read-modify-write per bin
/// update, one access per predicate evaluation and per tree-node visit.
/// Identical across platforms so energy differences come from per-access
/// cost, not counts.
pub fn trace_sram_accesses(totals: &WorkTotals) -> u64 {
    2 * totals.step1_bin_updates + totals.step3_records + totals.step5_node_visits
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepCost {
    pub cycles: f64,
    pub bu_cycles: f64,
    pub dram: DramTransfer,
    pub written: u64,
}

fn step1_pattern(contiguous: bool, selectivity: f64, cfg: &BoosterConfig) -> AccessPattern {
    if contiguous {
        AccessPattern::Contiguous
    } else {
        AccessPattern::ScatteredBlocks {
            row_fraction: selectivity.clamp(0.0, 1.0),
            block_bytes: cfg.block_bytes,
        }
    }
}

/// Histogram binning of one vertex's (smaller-child) subset.
pub fn sim_step1(
    binned: u64,
    record_stride: u64,
    contiguous: bool,
    selectivity: f64,
    profile: &MapProfile,
    cfg: &BoosterConfig,
    dram: &DramConfig,
) -> StepCost {
    if binned == 0 {
        return StepCost::default();
    }
    let bytes = binned * record_stride;
    let transfer = dram_stream_cycles(
        bytes,
        step1_pattern(contiguous, selectivity, cfg),
        dram,
        cfg.clock_ghz,
    );
    let replication = profile.replication(cfg) as f64;
    let bu_cycles = binned as f64
        * profile.max_fields_per_bu as f64
        * cfg.bu_cycles_per_field as f64
        / replication;
    StepCost {
        cycles: transfer.cycles.max(bu_cycles) + cfg.fill_cycles() as f64,
        bu_cycles,
        dram: transfer,
        written: 0,
    }
}

/// Predicate partition of a vertex's full subset; emits per-record pointers.
pub fn sim_step3(
    subset: u64,
    record_stride: u64,
    contiguous: bool,
    selectivity: f64,
    cfg: &BoosterConfig,
    dram: &DramConfig,
) -> StepCost {
    if subset == 0 {
        return StepCost { cycles: cfg.fill_cycles() as f64, ..StepCost::default() };
    }
    let (read_bytes, pattern) = if cfg.use_column_format {
        let p = if contiguous {
            AccessPattern::Contiguous
        } else {
            AccessPattern::ScatteredSpans { span_bytes: 1 }
        };
        (subset, p)
    } else {
        (subset * record_stride, step1_pattern(contiguous, selectivity, cfg))
    };
    let mut transfer = dram_stream_cycles(read_bytes, pattern, dram, cfg.clock_ghz);
    let written = 4 * subset;
    transfer.accumulate(dram_stream_cycles(
        written,
        AccessPattern::Contiguous,
        dram,
        cfg.clock_ghz,
    ));
    StepCost {
        cycles: transfer.cycles + cfg.fill_cycles() as f64,
        bu_cycles: 0.0,
        dram: transfer,
        written,
    }
}

/// One-tree traversal over all records, rewriting gradient pairs.
pub fn sim_step5(
    n_records: u64,
    fields_used: u64,
    avg_path_len: f64,
    record_stride: u64,
    cfg: &BoosterConfig,
    dram: &DramConfig,
) -> StepCost {
    const GRAD_BYTES: u64 = 16;
    let field_bytes = if cfg.use_column_format {
        n_records * fields_used
    } else {
        n_records * record_stride
    };
    let read_bytes = field_bytes + n_records * GRAD_BYTES;
    let written = n_records * GRAD_BYTES;
    let mut transfer =
        dram_stream_cycles(read_bytes, AccessPattern::Contiguous, dram, cfg.clock_ghz);
    transfer.accumulate(dram_stream_cycles(
        written,
        AccessPattern::Contiguous,
        dram,
        cfg.clock_ghz,
    ));
    let bu_cycles = n_records as f64 * avg_path_len * cfg.sram_access_cycles as f64
        / cfg.total_bus() as f64;
    StepCost {
        cycles: transfer.cycles.max(bu_cycles) + cfg.fill_cycles() as f64,
        bu_cycles,
        dram: transfer,
        written,
    }
}

/// Replay a training trace on the accelerator model.
pub fn sim_training(
    trace: &StepTrace,
    profile: &MapProfile,
    cfg: &BoosterConfig,
    dram: &DramConfig,
    host: &HostModel,
) -> CycleReport {
    let mut report = CycleReport::empty("booster", cfg.clock_ghz);
    let mut step1_bu = 0.0f64;
    let mut step1_dram = 0.0f64;
    let host_to_accel = cfg.clock_ghz / host.clock_ghz;
    for v in &trace.vertices {
        let c1 = sim_step1(
            v.binned_size,
            trace.record_stride,
            v.contiguous,
            v.selectivity,
            profile,
            cfg,
            dram,
        );
        report.step1_cycles += c1.cycles;
        report.bytes.step1_read += c1.dram.bytes;
        report.dram_row_hits += c1.dram.row_hits;
        report.dram_row_misses += c1.dram.row_misses;
        step1_bu += c1.bu_cycles;
        step1_dram += c1.dram.cycles;
        report.step2_host_cycles +=
            v.bins_scanned as f64 * host.cycles_per_bin as f64 * host_to_accel;
        if v.split {
            let c3 = sim_step3(
                v.subset_size,
                trace.record_stride,
                v.contiguous,
                v.selectivity,
                cfg,
                dram,
            );
            report.step3_cycles += c3.cycles;
            report.bytes.step3_read += c3.dram.bytes - c3.written;
            report.bytes.step3_written += c3.written;
            report.dram_row_hits += c3.dram.row_hits;
            report.dram_row_misses += c3.dram.row_misses;
        }
    }
    for t in &trace.trees {
        let c5 = sim_step5(
            t.n_records,
            t.fields_used,
            t.avg_path_len,
            trace.record_stride,
            cfg,
            dram,
        );
        report.step5_cycles += c5.cycles;
        report.bytes.step5_read += c5.dram.bytes - c5.written;
        report.bytes.step5_written += c5.written;
        report.dram_row_hits += c5.dram.row_hits;
        report.dram_row_misses += c5.dram.row_misses;
    }
    report.sram_accesses = trace_sram_accesses(&trace.totals());
    if report.step1_cycles > 0.0 {
        report.sram_bw_util = (step1_bu / report.step1_cycles).min(1.0);
        report.dram_bw_util = (step1_dram / report.step1_cycles).min(1.0);
    }
    report
}

#[derive(Debug, thiserror::Error)]
pub enum TimingError {
    #[error("ensemble needs {required} units ({trees} trees x {replicas} replicas), chip has {available}")]
    TooManyTrees { trees: usize, replicas: usize, required: usize, available: usize },
}

/// Batch inference: each record is broadcast to every unit, one block per
/// cycle; each unit walks its own tree table. `tree_paths` holds the
/// per-tree average traversal length in table entries.
pub fn sim_batch_inference(
    tree_paths: &[f64],
    n_records: u64,
    record_stride: u64,
    cfg: &BoosterConfig,
    dram: &DramConfig,
    replicas: usize,
) -> Result<CycleReport, TimingError> {
    let required = tree_paths.len() * replicas;
    if required > cfg.total_bus() {
        return Err(TimingError::TooManyTrees {
            trees: tree_paths.len(),
            replicas,
            required,
            available: cfg.total_bus(),
        });
    }
    let mut report = CycleReport::empty("booster", cfg.clock_ghz);
    let slowest = tree_paths.iter().cloned().fold(0.0f64, f64::max);
    let bu_per_record = slowest * cfg.sram_access_cycles as f64 / replicas.max(1) as f64;
    let blocks_per_record = record_stride.div_ceil(cfg.block_bytes as u64).max(1) as f64;
    let bytes = n_records * record_stride;
    let transfer = dram_stream_cycles(bytes, AccessPattern::Contiguous, dram, cfg.clock_ghz);
    let dram_per_record = if n_records > 0 { transfer.cycles / n_records as f64 } else { 0.0 };
    let per_record = bu_per_record.max(blocks_per_record).max(dram_per_record);
    report.inference_cycles = n_records as f64 * per_record + cfg.fill_cycles() as f64;
    report.bytes.inference_read = bytes;
    report.dram_row_hits = transfer.row_hits;
    report.dram_row_misses = transfer.row_misses;
    let visits: f64 = tree_paths.iter().map(|p| p * n_records as f64).sum();
    report.sram_accesses = visits.round() as u64;
    Ok(report)
}

/// Unit count at which step 1 flips from SRAM-bound to DRAM-bound for
/// contiguous full-record streaming.
pub fn step1_crossover_bus(n_fields: u64, record_bytes: u64, cfg: &BoosterConfig, dram: &DramConfig) -> f64 {
    n_fields as f64 * cfg.bu_cycles_per_field as f64 * dram.bytes_per_cycle(cfg.clock_ghz)
        / record_bytes as f64
}
