//! Experiment configuration, execution and output.

pub mod config;
pub mod csv;
pub mod run;
pub mod scenario;

pub use config::{parse_config, ConfigMap, ExperimentConfig, Initial, Mode, Tier};
pub use csv::{render_csv, write_csv, CSV_HEADER};
pub use run::{run_experiment, RunRecord};
pub use scenario::{scenario, SCENARIOS};
