//! Command-line pipeline around `zeta-mds-core`.
//!
//! Each subcommand lives in [`pipeline`] and returns a [`pipeline::StageError`]
//! on failure; the binary maps the stage to its exit code.

pub mod config;
pub mod manifest;
pub mod pipeline;
pub mod svg;

pub use config::{Cli, Command, RunConfig};
pub use pipeline::{run, Stage, StageError};
