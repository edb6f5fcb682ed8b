//! Config-driven verification, minimization and probing on top of `hardy-core`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! configuration and I/O errors.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{run_minimize, run_pairs, run_probe, run_transform, run_verify};
pub use config::{Overrides, ProblemConfig};
pub use error::CliError;
pub use report::{emit_plot_data, CheckRecord, Status, VerificationReport};
