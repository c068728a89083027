//! Analytic DRAM stream model. Cycles come from sustained bandwidth scaled
//! by a pattern efficiency; row hit/miss counts are tracked for reporting.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DramConfig {
    pub channels: usize,
    pub banks_per_channel: usize,
    pub row_bytes: usize,
    pub t_cas: u64,
    pub t_rp: u64,
    pub t_rcd: u64,
    pub t_ras: u64,
    pub mem_clock_ghz: f64,
    /// Data bytes one channel moves per memory cycle.
    pub channel_bytes_per_cycle: usize,
    pub sustained_gbps: f64,
}

impl Default for DramConfig {
    fn default() -> Self {
        DramConfig {
            channels: 24,
            banks_per_channel: 16,
            row_bytes: 1024,
            t_cas: 12,
            t_rp: 12,
            t_rcd: 12,
            t_ras: 28,
            mem_clock_ghz: 1.0,
            channel_bytes_per_cycle: 32,
            sustained_gbps: 400.0,
        }
    }
}

impl DramConfig {
    /// Row cycle time: minimum spacing of activates to one bank.
    pub fn t_rc(&self) -> u64 {
        self.t_ras + self.t_rp
    }

    pub fn peak_gbps(&self) -> f64 {
        self.channels as f64 * self.channel_bytes_per_cycle as f64 * self.mem_clock_ghz
    }

    /// Bytes delivered per accelerator cycle at sustained bandwidth.
    pub fn bytes_per_cycle(&self, clock_ghz: f64) -> f64 {
        self.sustained_gbps / clock_ghz
    }
}

/// Spatial shape of a DRAM stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AccessPattern {
    /// Sequential full-row streaming.
    Contiguous,
    /// Whole blocks picked from sparse rows; `row_fraction` is the fraction
    /// of each row's blocks that the stream touches.
    ScatteredBlocks { row_fraction: f64, block_bytes: usize },
    /// Short per-record spans (single-field column reads of a sparse subset).
    ScatteredSpans { span_bytes: usize },
}

impl AccessPattern {
    /// Fraction of sustained bandwidth the pattern achieves. Each bank can
    /// open one row per tRC; a visit streams out the bytes the pattern
    /// touches in that row, so the channel sustains
    /// banks x touched_cycles / tRC of its transfer rate.
    pub fn efficiency(&self, dram: &DramConfig) -> f64 {
        match *self {
            AccessPattern::Contiguous => 1.0,
            AccessPattern::ScatteredBlocks { row_fraction, block_bytes } => {
                let blocks_per_row = (dram.row_bytes / block_bytes).max(1);
                let touched = (row_fraction * blocks_per_row as f64).round().max(1.0);
                let block_cycles = block_bytes.div_ceil(dram.channel_bytes_per_cycle) as f64;
                let eff = dram.banks_per_channel as f64 * touched * block_cycles
                    / dram.t_rc() as f64;
                eff.min(1.0)
            }
            AccessPattern::ScatteredSpans { span_bytes } => {
                let span_cycles = span_bytes.div_ceil(dram.channel_bytes_per_cycle) as f64;
                let eff =
                    dram.banks_per_channel as f64 * span_cycles / dram.t_rc() as f64;
                eff.min(1.0)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DramTransfer {
    pub cycles: f64,
    pub row_hits: u64,
    pub row_misses: u64,
    pub bytes: u64,
}

impl DramTransfer {
    pub fn accumulate(&mut self, other: DramTransfer) {
        self.cycles += other.cycles;
        self.row_hits += other.row_hits;
        self.row_misses += other.row_misses;
        self.bytes += other.bytes;
    }
}

/// Cycles (at `clock_ghz`) to stream `bytes` with the given pattern.
pub fn dram_stream_cycles(
    bytes: u64,
    pattern: AccessPattern,
    dram: &DramConfig,
    clock_ghz: f64,
) -> DramTransfer {
    if bytes == 0 {
        return DramTransfer::default();
    }
    let eff = pattern.efficiency(dram);
    let cycles = bytes as f64 / (dram.bytes_per_cycle(clock_ghz) * eff);
    let bursts = bytes.div_ceil(dram.channel_bytes_per_cycle as u64);
    let row_misses = match pattern {
        AccessPattern::Contiguous => bytes.div_ceil(dram.row_bytes as u64),
        AccessPattern::ScatteredBlocks { block_bytes, .. } => {
            bytes.div_ceil(block_bytes as u64)
        }
        AccessPattern::ScatteredSpans { span_bytes } => bytes.div_ceil(span_bytes as u64),
    };
    let row_misses = row_misses.min(bursts);
    DramTransfer {
        cycles,
        row_hits: bursts - row_misses,
        row_misses,
        bytes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_bytes_zero_cycles() {
        let t = dram_stream_cycles(0, AccessPattern::Contiguous, &DramConfig::default(), 1.0);
        assert_eq!(t.cycles, 0.0);
        assert_eq!(t.row_hits + t.row_misses, 0);
    }

    #[test]
    fn contiguous_stream_at_sustained_rate() {
        // 64 GB at 400 B per 1 GHz cycle is 1.6e8 cycles.
        let bytes = 64_000_000_000u64;
        let t = dram_stream_cycles(bytes, AccessPattern::Contiguous, &DramConfig::default(), 1.0);
        assert!((t.cycles - 1.6e8).abs() < 1.0);
    }

    #[test]
    fn scattered_blocks_efficiency() {
        let dram = DramConfig::default();
        let p = AccessPattern::ScatteredBlocks { row_fraction: 0.0625, block_bytes: 64 };
        assert!((p.efficiency(&dram) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn scattered_spans_efficiency() {
        let dram = DramConfig::default();
        let p = AccessPattern::ScatteredSpans { span_bytes: 1 };
        assert!((p.efficiency(&dram) - 0.4).abs() < 1e-12);
        let wide = AccessPattern::ScatteredSpans { span_bytes: 1024 };
        assert_eq!(wide.efficiency(&dram), 1.0);
    }

    #[test]
    fn efficiency_monotone_in_density() {
        let dram = DramConfig::default();
        let mut last = 0.0;
        for i in 1..=16 {
            let p = AccessPattern::ScatteredBlocks {
                row_fraction: i as f64 / 16.0,
                block_bytes: 64,
            };
            let e = p.efficiency(&dram);
            assert!(e >= last);
            last = e;
        }
        assert_eq!(last, 1.0);
    }

    #[test]
    fn sustained_below_peak() {
        let dram = DramConfig::default();
        assert!(dram.sustained_gbps <= dram.peak_gbps());
    }
}
