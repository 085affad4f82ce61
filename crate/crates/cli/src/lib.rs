//! Experiment orchestration for the edising chain: configuration, seeded
//! ensemble sweeps, eigendecomposition caching, CSV emission, and
//! fit/statistics reports. The `edising` binary is a thin argument parser
//! over [`experiments`].

pub mod config;
pub mod experiments;
pub mod manifest;

pub use config::{ParamsChoice, RunConfig, TimeGrid};
pub use experiments::{
    run_collapse, run_diffusion, run_entanglement, run_levelstats, run_saturation,
};
