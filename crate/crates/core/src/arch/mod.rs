//! Accelerator organization: unit/cluster configuration, bin-to-SRAM
//! mapping strategies, and the flat tree-table encoding.

pub mod sram_map;
pub mod tree_table;

pub use sram_map::{map_group_by_field, map_naive_pack, BuOccupancy, MapStrategy, SramMap};
pub use tree_table::{encode_tree_table, TableEntry, TreeTable};

use serde::{Deserialize, Serialize};

/// Hardware parameters of the accelerator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoosterConfig {
    pub n_clusters: usize,
    pub bus_per_cluster: usize,
    /// SRAM capacity per unit, bytes.
    pub sram_bytes: usize,
    /// Bytes of bin state per histogram bin (count + G + H).
    pub bin_entry_bytes: usize,
    /// Units served by one link of the pipelined broadcast bus.
    pub bus_per_link: usize,
    pub clock_ghz: f64,
    /// Memory block size, bytes.
    pub block_bytes: usize,
    /// Per-field compute budget of a unit: bin subtract, SRAM read, two
    /// pipelined adds, SRAM write.
    pub bu_cycles_per_field: usize,
    /// SRAM cycles per tree-table lookup during traversal.
    pub sram_access_cycles: usize,
    /// Bytes per encoded tree-table entry.
    pub tree_entry_bytes: usize,
    /// Whether the redundant per-field column-major format is used for the
    /// single-predicate and one-tree-traversal steps.
    pub use_column_format: bool,
}

impl Default for BoosterConfig {
    fn default() -> Self {
        BoosterConfig {
            n_clusters: 50,
            bus_per_cluster: 64,
            sram_bytes: 2048,
            bin_entry_bytes: 20,
            bus_per_link: 16,
            clock_ghz: 1.0,
            block_bytes: 64,
            bu_cycles_per_field: 8,
            sram_access_cycles: 2,
            tree_entry_bytes: 16,
            use_column_format: true,
        }
    }
}

impl BoosterConfig {
    pub fn total_bus(&self) -> usize {
        self.n_clusters * self.bus_per_cluster
    }

    /// Histogram bins one SRAM can hold.
    pub fn bins_per_sram(&self) -> usize {
        self.sram_bytes / self.bin_entry_bytes
    }

    /// Broadcast-pipeline fill cycles.
    pub fn fill_cycles(&self) -> u64 {
        (self.total_bus() / self.bus_per_link) as u64
    }

    /// Sized so one SRAM holds a full default numeric field's bins.
    pub fn with_sram_for_bins(mut self, bins: usize) -> Self {
        self.sram_bytes = bins * self.bin_entry_bytes;
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ArchError {
    #[error("aggregate SRAM capacity exceeded: need {required} bytes, have {available}")]
    CapacityExceeded { required: usize, available: usize },
    #[error("tree needs {required} bytes but an SRAM holds {available}")]
    TreeTooLarge { required: usize, available: usize },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_parameters_match_the_hardware_table() {
        let cfg = BoosterConfig::default();
        assert_eq!(cfg.total_bus(), 3200);
        assert_eq!(cfg.fill_cycles(), 200);
        assert_eq!(cfg.sram_bytes, 2048);
        assert_eq!(cfg.clock_ghz, 1.0);
    }
}
