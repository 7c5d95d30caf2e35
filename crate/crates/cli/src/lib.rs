//! Command-line front end: building descriptions in TOML, time series in
//! CSV, simulation and comparison against measurements.

pub mod compare;
pub mod config;
pub mod error;
pub mod model;
pub mod run;
pub mod timeseries;

pub use compare::{compare, ComparisonStats};
pub use config::{parse_building, serialize, BuildingDescription};
pub use error::{CliError, Location};
pub use model::{build_scenario, Scenario};
pub use run::{run, run_batch, RunOptions, RunSummary};
pub use timeseries::ingest_timeseries;
