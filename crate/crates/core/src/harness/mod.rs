//! Deterministic sweep harness: counter-based sampling, CSV emission,
//! config parsing, and the envelope suites.

pub mod config;
pub mod csv;
pub mod rng;
pub mod suites;

pub use config::{load_config, parse_config};
pub use csv::{csv_bytes, emit_csv, Field};
pub use rng::PointRng;
pub use suites::{run_suite, run_suite_outcome, Suite, SuiteOutcome, SweepConfig, CSV_SCHEMA};
pub use crate::util::fit_loglog_slope;
