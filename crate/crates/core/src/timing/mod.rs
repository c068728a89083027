//! Cycle-approximate platform simulation driven by training traces.

pub mod dram;
pub mod sim;

pub use dram::{dram_stream_cycles, AccessPattern, DramConfig, DramTransfer};
pub use sim::{
    sim_batch_inference, sim_step1, sim_step3, sim_step5, sim_training, step1_crossover_bus,
    trace_sram_accesses, CycleReport, HostModel, MapProfile, StepBytes, StepCost, TimingError,
};
