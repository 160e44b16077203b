//! Harness layer over the benchmark core: configuration, run
//! orchestration, demand-data protocol, manifests and plots.

pub mod config;
pub mod demand;
pub mod manifest;
pub mod plot;
pub mod runapi;
