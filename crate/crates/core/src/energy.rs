//! Access-count energy accounting. SRAM and DRAM energies are reported
//! separately and never summed: per-access costs come from different
//! technology estimates and only within-column comparisons are meaningful.

use serde::{Deserialize, Serialize};

use crate::timing::CycleReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyParams {
    /// Per-access SRAM energy normalized to the multicore's cache access.
    pub sram_norm_ideal32: f64,
    pub sram_norm_gpu: f64,
    pub sram_norm_booster: f64,
    pub dram_energy_per_byte: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            sram_norm_ideal32: 1.0,
            sram_norm_gpu: 2.64,
            sram_norm_booster: 0.71,
            dram_energy_per_byte: 1.0,
        }
    }
}

impl EnergyParams {
    pub fn sram_norm(&self, platform: &str) -> f64 {
        match platform {
            "ideal_gpu" => self.sram_norm_gpu,
            "booster" => self.sram_norm_booster,
            _ => self.sram_norm_ideal32,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub platform: String,
    pub sram_accesses: u64,
    pub dram_bytes: u64,
    /// Normalized units; not commensurable with `dram_energy`.
    pub sram_energy: f64,
    pub dram_energy: f64,
}

pub fn energy_report(cycles: &CycleReport, params: &EnergyParams) -> EnergyReport {
    let dram_bytes = cycles.bytes.total();
    EnergyReport {
        platform: cycles.platform.clone(),
        sram_accesses: cycles.sram_accesses,
        dram_bytes,
        sram_energy: cycles.sram_accesses as f64 * params.sram_norm(&cycles.platform),
        dram_energy: dram_bytes as f64 * params.dram_energy_per_byte,
    }
}
