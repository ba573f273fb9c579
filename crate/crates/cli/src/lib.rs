//! Library side of the `geophase` command: configuration and dispatch.

pub mod config;
pub mod run;

pub use config::{Experiment, Overrides, Provenance, RunConfig, RunMode};
pub use run::{run, Table};
