//! Command-line frontend for `spherepd`: text formats, kernel labels and subcommands.

pub mod commands;
pub mod error;
pub mod formats;
pub mod kernels;

pub use commands::{run, Outcome};
pub use error::{CliError, Result};
