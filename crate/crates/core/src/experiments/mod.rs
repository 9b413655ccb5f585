//! Declarative experiment configs, the batch runner and the preset catalog.

mod config;
mod presets;
mod run;

pub use config::*;
pub use presets::{list_presets, preset, Preset};
pub use run::{
    output_root, run_experiment, validate, verify_manifest, ExitStatus, RunError, RunManifest,
    RunReport, DECIMAL_DIGITS, OUTPUT_ROOT_VAR,
};
