//! File formats, reports and the command-line pipeline around
//! [`acttopic_core`].
//!
//! The pipeline is `ingest` → `fit` → `assign` → `eval`; see the
//! [`commands`] module for each stage and [`formats`] for the on-disk
//! layouts they read and write.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod report;

pub use error::{Error, Result};

/// Version string recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
