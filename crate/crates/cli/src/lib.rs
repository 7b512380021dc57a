//! Command-line front end and HTTP service for hierarchical cluster
//! coherence analysis.

pub mod commands;
pub mod error;
pub mod output;
pub mod service;

pub use error::{CliError, CliResult};
