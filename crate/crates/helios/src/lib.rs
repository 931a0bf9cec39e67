//! File formats, run directories and the `helios` command line around
//! `helios-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod format;
pub mod gnuplot;
pub mod rundir;
pub mod symmetry;

pub use error::{CliError, Result};
