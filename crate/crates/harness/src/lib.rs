//! Scenario files, sweeps, CSV output and the `iccsim` command line for
//! [`icc_core`].

pub mod config;
mod error;
pub mod hardware;
pub mod metrics;
pub mod output;
pub mod scenario;
pub mod sweep;

pub use error::{HarnessError, Result};
