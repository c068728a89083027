//! Gradient-boosted decision-tree training engine paired with a
//! cycle-approximate model of a sea-of-small-SRAMs accelerator and analytic
//! multicore/GPU/inter-record baselines.

pub mod arch;
pub mod baselines;
pub mod data;
pub mod energy;
pub mod gbt;
pub mod report;
pub mod timing;
