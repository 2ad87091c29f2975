//! Std companion of `spinboson-core`: experiment configuration, parallel
//! sweeps and CSV / JSON reports behind the `spinboson` binary.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{Command, ConfigError, ExperimentConfig, Format, Sweep};
pub use experiments::{
    build_channel, execute, run, run_crossover_diagram, run_flow_map, run_phase_variance, run_scaling, run_sudden_change_sweep, RunError,
};
pub use output::{Report, Value};
