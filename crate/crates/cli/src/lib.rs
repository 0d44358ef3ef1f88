//! Experiment harness around the `magtorus` library: synthesis of random
//! admissible fields, forward invariants, inversion, round-trip studies and
//! lattice diagnostics.

pub mod commands;
pub mod config;
pub mod plot;

pub use config::ExperimentConfig;
