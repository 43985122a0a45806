//! Library side of the `mprofile` command-line tool: series ingestion,
//! profile CSV, SVG plots and the subcommand bodies.

pub mod commands;
pub mod error;
pub mod input;
pub mod output;
pub mod plot;

pub use error::{CliError, Result};
