//! Experiment runner for the finite forcing laboratory.
//!
//! Generates every small iteration within configured bounds, runs the
//! verification suites over each instance in parallel, and writes sorted
//! line-delimited JSON records plus a summary. Counterexamples carry ids
//! that [`replay`] reruns in isolation.

pub mod census;
pub mod config;
pub mod run;
pub mod text;

pub use census::{generate_providers, Catalog, CensusError, Tree};
pub use config::{ConfigError, ExperimentConfig, Suite};
pub use run::{replay, run, run_on, summary_path, ReportLine, RunError, RunReport};
pub use text::{format_poset, format_provider_table, parse_poset, parse_provider_table, TextError};
