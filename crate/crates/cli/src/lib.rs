//! Command-line front end.

pub mod commands;
pub mod config;
pub mod error;
pub mod presets;
pub mod spectra;
pub mod svg;
pub mod sweep;
pub mod table;

pub use commands::run;
pub use error::{CliError, CliResult};
