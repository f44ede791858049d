//! Library side of the `abm` binary: run specifications, subcommands and
//! output writers.

pub mod commands;
pub mod error;
pub mod output;
pub mod spec;

pub use error::CliError;
pub use spec::RunSpec;
