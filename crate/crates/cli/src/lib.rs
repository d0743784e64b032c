//! Command-line companion of `qbattery-core`: scenario documents, the
//! built-in catalog, parallel sweeps, CSV and manifest output, and a fast
//! self-check.

pub mod catalog;
pub mod config;
pub mod error;
pub mod jobs;
pub mod manifest;
pub mod output;
pub mod runner;
pub mod selfcheck;

pub use qbattery_core;
