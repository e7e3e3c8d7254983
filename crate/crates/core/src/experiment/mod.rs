//! Config-driven experiment runs and their CSV traces.

mod config;
mod run;
mod traces;

pub use config::{
    parse_config, serialize_config, ExperimentConfig, ExperimentKind, DEFAULT_R, DEFAULT_SEED,
    DEFAULT_STEP, DEFAULT_S_LIST, DEFAULT_TOL,
};
pub use run::{checks_table, default_times, run, RunReport};
pub use traces::{emit_traces, read_table, Table};
