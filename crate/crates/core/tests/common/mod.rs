//! Independent oracles shared by the integration suites. These deliberately
//! avoid the library's incremental formulations: splits by brute-force
//! enumeration with direct summation, DRAM efficiency by a small
//! discrete-event bank simulation.
// Each integration target compiles this module; not all of them use every oracle.
#![allow(dead_code)]

use booster_core::gbt::{BinStats, Histogram};
use booster_core::timing::DramConfig;

fn oracle_gain(
    left: (f64, f64),
    right: (f64, f64),
    lambda: f64,
    gamma: f64,
) -> f64 {
    let score = |g: f64, h: f64| g * g / (h + lambda);
    0.5 * (score(left.0, left.1) + score(right.0, right.1)
        - score(left.0 + right.0, left.1 + right.1))
        - gamma
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSplit {
    pub field_id: u32,
    pub bin_boundary: u8,
    pub missing_goes_left: bool,
    pub gain: f64,
}

/// Brute-force best split: for every field, boundary, and missing direction,
/// sum the member bins directly and keep the first strict improvement, in
/// the same (field, boundary, missing-right-first) order the engine uses.
pub fn exhaustive_best_split(
    histograms: &[Histogram],
    lambda: f64,
    gamma: f64,
) -> Option<OracleSplit> {
    let mut best: Option<OracleSplit> = None;
    for hist in histograms {
        let n_bins = hist.bins.len();
        if n_bins < 2 {
            continue;
        }
        let missing = n_bins - 1;
        let sum_range = |lo: usize, hi: usize| -> BinStats {
            let mut acc = BinStats::default();
            for b in &hist.bins[lo..hi] {
                acc.count += b.count;
                acc.g += b.g;
                acc.h += b.h;
            }
            acc
        };
        for missing_goes_left in [false, true] {
            for boundary in 0..missing {
                let mut left = sum_range(0, boundary + 1);
                let mut right = sum_range(boundary + 1, missing);
                let m = hist.bins[missing];
                if missing_goes_left {
                    left.count += m.count;
                    left.g += m.g;
                    left.h += m.h;
                } else {
                    right.count += m.count;
                    right.g += m.g;
                    right.h += m.h;
                }
                let gain = oracle_gain((left.g, left.h), (right.g, right.h), lambda, gamma);
                if gain > best.map_or(0.0, |b| b.gain) {
                    best = Some(OracleSplit {
                        field_id: hist.field_id,
                        bin_boundary: boundary as u8,
                        missing_goes_left,
                        gain,
                    });
                }
            }
        }
    }
    best
}

/// Discrete-event single-channel DRAM bank model: round-robin bank
/// interleaving, one row activation per visit, `blocks_per_visit` transfer
/// bursts streamed per open row. Returns achieved data-bus utilization.
pub fn dram_bank_oracle(
    dram: &DramConfig,
    n_visits: usize,
    blocks_per_visit: usize,
    block_bytes: usize,
) -> f64 {
    let burst_cycles =
        (block_bytes.div_ceil(dram.channel_bytes_per_cycle)) as u64 * blocks_per_visit as u64;
    let mut bank_ready = vec![0u64; dram.banks_per_channel];
    let mut bus_free = 0u64;
    let mut busy = 0u64;
    for i in 0..n_visits {
        let bank = i % dram.banks_per_channel;
        let activate = bank_ready[bank];
        let data_ready = activate + dram.t_rcd + dram.t_cas;
        let start = data_ready.max(bus_free);
        bus_free = start + burst_cycles;
        busy += burst_cycles;
        bank_ready[bank] = activate + dram.t_rc();
    }
    busy as f64 / bus_free as f64
}
