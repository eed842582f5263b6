//! Presets, JSON configs, exports and the `dret` command line on top of
//! `dret-core`.

pub mod cli;
pub mod config;
pub mod export;
pub mod run;
pub mod scenarios;

pub use config::{load_config, RunConfig};
pub use run::{run, Outcome, RunError};
pub use scenarios::{all_presets, preset, ScenarioPreset};
