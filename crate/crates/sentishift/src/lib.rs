//! File formats, run configuration and the `sentishift` command line.
//!
//! Numerical work lives in [`sentishift_core`]; this crate reads inputs,
//! drives each stage (in parallel where the core contract allows it) and
//! writes reproducible CSV/JSON outputs with a manifest per stage.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod manifest;

pub use config::{Overrides, Resolved, RunConfig};
pub use error::{CliError, Result};
