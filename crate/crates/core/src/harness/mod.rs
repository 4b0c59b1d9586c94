//! Monte-Carlo BLER experiments: configuration, seeded parallel trials,
//! per-channel error accounting and result files.

pub mod config;
pub mod output;
pub mod runner;
pub mod stats;

pub use config::{ChannelConfig, EarlyStop, ExperimentConfig, Scheme, SigmaMode};
pub use output::{csv_string, emit_results, Snapshot, CSV_HEADER};
pub use runner::{run_experiment, trial_rng, BlerPoint, Experiment, PointSummary, RunReport};
pub use stats::wilson_interval;
