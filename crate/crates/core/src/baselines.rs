//! Analytic upper-bound platforms: an ideal 32-core multicore, an ideal
//! 64-way GPU, and the capacity-limited inter-record scheme. All share the
//! DRAM model and replay the same training traces as the accelerator.

use serde::{Deserialize, Serialize};

use crate::gbt::StepTrace;
use crate::timing::{
    dram_stream_cycles, trace_sram_accesses, AccessPattern, CycleReport, DramConfig, HostModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Ideal32,
    IdealGpu,
    InterRecord,
}

/// Per-primitive compute costs in platform cycles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OpCycles {
    pub bin_update: u64,
    pub predicate_eval: u64,
    pub node_visit: u64,
}

impl Default for OpCycles {
    fn default() -> Self {
        OpCycles { bin_update: 4, predicate_eval: 2, node_visit: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    pub kind: BaselineKind,
    /// Worker count; for inter-record this is a cap, the effective count is
    /// capacity-derived.
    pub parallelism: usize,
    pub clock_ghz: f64,
    pub op_cycles: OpCycles,
    /// Bytes one inter-record histogram copy occupies; 0 means derive as
    /// 8 bytes per bin.
    pub ir_copy_bytes: usize,
    /// Aggregate on-chip SRAM available to inter-record copies.
    pub ir_total_sram_bytes: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig::ideal32()
    }
}

impl BaselineConfig {
    pub fn ideal32() -> Self {
        BaselineConfig {
            kind: BaselineKind::Ideal32,
            parallelism: 32,
            clock_ghz: 2.2,
            op_cycles: OpCycles::default(),
            ir_copy_bytes: 0,
            ir_total_sram_bytes: 3200 * 2048,
        }
    }

    pub fn ideal_gpu() -> Self {
        BaselineConfig {
            kind: BaselineKind::IdealGpu,
            parallelism: 64,
            ..BaselineConfig::ideal32()
        }
    }

    pub fn inter_record() -> Self {
        BaselineConfig {
            kind: BaselineKind::InterRecord,
            parallelism: 4096,
            clock_ghz: 1.0,
            ..BaselineConfig::ideal32()
        }
    }

    /// Parallelism-1 reference for sequential share accounting.
    pub fn sequential() -> Self {
        BaselineConfig { parallelism: 1, ..BaselineConfig::ideal32() }
    }

    pub fn platform_name(&self) -> &'static str {
        if self.parallelism == 1 {
            return "sequential";
        }
        match self.kind {
            BaselineKind::Ideal32 => "ideal32",
            BaselineKind::IdealGpu => "ideal_gpu",
            BaselineKind::InterRecord => "inter_record",
        }
    }

    /// Effective worker count; errors when not even one inter-record
    /// histogram copy fits on chip.
    pub fn effective_parallelism(&self, total_bins: u64) -> Result<usize, BaselineError> {
        if self.kind != BaselineKind::InterRecord {
            return Ok(self.parallelism);
        }
        let copy_bytes = if self.ir_copy_bytes > 0 {
            self.ir_copy_bytes
        } else {
            total_bins as usize * 8
        };
        let units = self.ir_total_sram_bytes / copy_bytes.max(1);
        if units == 0 {
            return Err(BaselineError::Infeasible {
                copy_bytes,
                available: self.ir_total_sram_bytes,
            });
        }
        Ok(units.min(self.parallelism))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BaselineError {
    #[error("inter-record scheme infeasible: one histogram copy needs {copy_bytes} bytes, chip has {available}")]
    Infeasible { copy_bytes: usize, available: usize },
    #[error("speedup table needs an ideal32 reference row")]
    MissingReference,
    #[error("speedup table rows describe different workloads")]
    MismatchedWorkloads,
}

fn scattered(selectivity: f64, contiguous: bool) -> AccessPattern {
    if contiguous {
        AccessPattern::Contiguous
    } else {
        AccessPattern::ScatteredBlocks { row_fraction: selectivity.clamp(0.0, 1.0), block_bytes: 64 }
    }
}

/// Replay a training trace on a baseline platform. Baselines always move
/// row-major records; compute is the primitive-op count divided by the
/// worker count, never faster than the DRAM stream.
pub fn baseline_step_cycles(
    trace: &StepTrace,
    cfg: &BaselineConfig,
    dram: &DramConfig,
    host: &HostModel,
) -> Result<CycleReport, BaselineError> {
    let p = cfg.effective_parallelism(trace.total_bins)? as f64;
    let mut report = CycleReport::empty(cfg.platform_name(), cfg.clock_ghz);
    let host_to_platform = cfg.clock_ghz / host.clock_ghz;
    let reduction_depth = (p.log2().ceil()).max(0.0);
    let mut step1_compute = 0.0f64;
    let mut step1_dram = 0.0f64;
    for v in &trace.vertices {
        if v.binned_size > 0 {
            let ops = v.binned_size as f64
                * trace.n_fields as f64
                * cfg.op_cycles.bin_update as f64;
            // Per-worker private histograms merged by a fixed-order
            // parallel reduction.
            let reduction =
                trace.total_bins as f64 * cfg.op_cycles.bin_update as f64 * reduction_depth;
            let compute = ops / p + reduction / p;
            let bytes = v.binned_size * trace.record_stride;
            let t = dram_stream_cycles(
                bytes,
                scattered(v.selectivity, v.contiguous),
                dram,
                cfg.clock_ghz,
            );
            report.step1_cycles += compute.max(t.cycles);
            report.bytes.step1_read += t.bytes;
            report.dram_row_hits += t.row_hits;
            report.dram_row_misses += t.row_misses;
            step1_compute += compute;
            step1_dram += t.cycles;
        }
        report.step2_host_cycles +=
            v.bins_scanned as f64 * host.cycles_per_bin as f64 * host_to_platform;
        if v.split {
            let ops =
                v.subset_size as f64 * cfg.op_cycles.predicate_eval as f64 / p;
            let read = v.subset_size * trace.record_stride;
            let mut t = dram_stream_cycles(
                read,
                scattered(v.selectivity, v.contiguous),
                dram,
                cfg.clock_ghz,
            );
            let written = 4 * v.subset_size;
            t.accumulate(dram_stream_cycles(
                written,
                AccessPattern::Contiguous,
                dram,
                cfg.clock_ghz,
            ));
            report.step3_cycles += ops.max(t.cycles);
            report.bytes.step3_read += read;
            report.bytes.step3_written += written;
            report.dram_row_hits += t.row_hits;
            report.dram_row_misses += t.row_misses;
        }
    }
    for t in &trace.trees {
        let ops =
            t.n_records as f64 * t.avg_path_len * cfg.op_cycles.node_visit as f64 / p;
        let read = t.n_records * (trace.record_stride + 16);
        let written = t.n_records * 16;
        let mut tr = dram_stream_cycles(read, AccessPattern::Contiguous, dram, cfg.clock_ghz);
        tr.accumulate(dram_stream_cycles(
            written,
            AccessPattern::Contiguous,
            dram,
            cfg.clock_ghz,
        ));
        report.step5_cycles += ops.max(tr.cycles);
        report.bytes.step5_read += read;
        report.bytes.step5_written += written;
        report.dram_row_hits += tr.row_hits;
        report.dram_row_misses += tr.row_misses;
    }
    report.sram_accesses = trace_sram_accesses(&trace.totals());
    if report.step1_cycles > 0.0 {
        report.sram_bw_util = (step1_compute / report.step1_cycles).min(1.0);
        report.dram_bw_util = (step1_dram / report.step1_cycles).min(1.0);
    }
    Ok(report)
}

/// Ensemble inference on a baseline: every record walks every tree.
pub fn baseline_inference(
    tree_paths: &[f64],
    n_records: u64,
    record_stride: u64,
    cfg: &BaselineConfig,
    dram: &DramConfig,
) -> CycleReport {
    let p = cfg.parallelism as f64;
    let mut report = CycleReport::empty(cfg.platform_name(), cfg.clock_ghz);
    let visits: f64 = tree_paths.iter().map(|l| l * n_records as f64).sum();
    let compute = visits * cfg.op_cycles.node_visit as f64 / p;
    let bytes = n_records * record_stride;
    let t = dram_stream_cycles(bytes, AccessPattern::Contiguous, dram, cfg.clock_ghz);
    report.inference_cycles = compute.max(t.cycles);
    report.bytes.inference_read = bytes;
    report.dram_row_hits = t.row_hits;
    report.dram_row_misses = t.row_misses;
    report.sram_accesses = visits.round() as u64;
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupRow {
    pub platform: String,
    pub wall_ns: f64,
    /// Relative to the ideal32 row.
    pub speedup: f64,
    /// Fraction of this platform's cycles per step, summing to 1.
    pub step_shares: Vec<(&'static str, f64)>,
}

/// Wall times and speedups normalized to ideal32, with per-step shares.
pub fn speedup_table(reports: &[CycleReport]) -> Result<Vec<SpeedupRow>, BaselineError> {
    let reference = reports
        .iter()
        .find(|r| r.platform == "ideal32")
        .ok_or(BaselineError::MissingReference)?;
    if reports.iter().any(|r| r.sram_accesses != reference.sram_accesses) {
        return Err(BaselineError::MismatchedWorkloads);
    }
    let ref_wall = reference.wall_ns();
    Ok(reports
        .iter()
        .map(|r| {
            let total = r.total_cycles();
            let shares = r
                .step_cycles()
                .iter()
                .map(|&(name, c)| (name, if total > 0.0 { c / total } else { 0.0 }))
                .collect();
            SpeedupRow {
                platform: r.platform.clone(),
                wall_ns: r.wall_ns(),
                speedup: ref_wall / r.wall_ns(),
                step_shares: shares,
            }
        })
        .collect())
}

pub fn geomean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 1.0;
    }
    (values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{quantize_from_raw, synth_dataset, SynthSpec, DEFAULT_MAX_BINS};
    use crate::gbt::{train, TrainConfig};

    fn higgs_trace(n: usize) -> StepTrace {
        let spec = SynthSpec::higgs_analog(n, 7);
        let raw = synth_dataset(&spec);
        let dataset = quantize_from_raw(&raw, &spec.schemas(DEFAULT_MAX_BINS)).unwrap();
        let config = TrainConfig { n_trees: 2, ..TrainConfig::default() };
        train(&dataset, &config).unwrap().trace
    }

    #[test]
    fn sequential_reference_is_step135_dominated() {
        // The host split-search cost is constant per vertex, so its share
        // shrinks with record count; at a few hundred thousand records the
        // accelerated steps dominate.
        let trace = higgs_trace(500_000);
        let report = baseline_step_cycles(
            &trace,
            &BaselineConfig::sequential(),
            &DramConfig::default(),
            &HostModel::default(),
        )
        .unwrap();
        let total = report.total_cycles();
        let accel = report.step1_cycles + report.step3_cycles + report.step5_cycles;
        assert!(accel / total >= 0.90, "share {}", accel / total);
    }

    #[test]
    fn gpu_never_slower_than_multicore() {
        let trace = higgs_trace(20_000);
        let dram = DramConfig::default();
        let host = HostModel::default();
        let m = baseline_step_cycles(&trace, &BaselineConfig::ideal32(), &dram, &host).unwrap();
        let g = baseline_step_cycles(&trace, &BaselineConfig::ideal_gpu(), &dram, &host).unwrap();
        for ((_, a), (_, b)) in m.step_cycles().iter().zip(g.step_cycles().iter()) {
            assert!(b <= a);
        }
        let ratio = m.wall_ns() / g.wall_ns();
        assert!(ratio > 1.0 && ratio <= 2.0, "ratio {ratio}");
    }

    #[test]
    fn inter_record_unit_count_is_capacity_derived() {
        let cfg = BaselineConfig { ir_copy_bytes: 24_183, ..BaselineConfig::inter_record() };
        assert_eq!(cfg.effective_parallelism(7168).unwrap(), 271);
        let tight = BaselineConfig {
            ir_copy_bytes: 10_000_000,
            ..BaselineConfig::inter_record()
        };
        assert!(matches!(
            tight.effective_parallelism(7168),
            Err(BaselineError::Infeasible { .. })
        ));
    }

    #[test]
    fn inter_record_with_forced_32_units_tracks_ideal32_compute() {
        let trace = higgs_trace(20_000);
        let dram = DramConfig::default();
        let host = HostModel::default();
        let ir = BaselineConfig {
            parallelism: 32,
            clock_ghz: 2.2,
            ir_copy_bytes: 3200 * 2048 / 32,
            ..BaselineConfig::inter_record()
        };
        let a = baseline_step_cycles(&trace, &ir, &dram, &host).unwrap();
        let b = baseline_step_cycles(&trace, &BaselineConfig::ideal32(), &dram, &host).unwrap();
        assert!((a.wall_ns() - b.wall_ns()).abs() / b.wall_ns() < 1e-9);
    }

    #[test]
    fn identical_reports_speed_up_by_one() {
        let trace = higgs_trace(10_000);
        let report = baseline_step_cycles(
            &trace,
            &BaselineConfig::ideal32(),
            &DramConfig::default(),
            &HostModel::default(),
        )
        .unwrap();
        let rows = speedup_table(&[report.clone(), report]).unwrap();
        for row in rows {
            assert!((row.speedup - 1.0).abs() < 1e-12);
            let share_sum: f64 = row.step_shares.iter().map(|(_, s)| s).sum();
            assert!((share_sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn geomean_matches_hand_arithmetic() {
        let g = geomean(&[2.0, 8.0, 4.0]);
        assert!((g - 4.0).abs() < 1e-12);
    }
}
