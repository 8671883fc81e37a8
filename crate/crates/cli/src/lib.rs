//! Instance I/O, output formats and the `stepfit` command.

pub mod cli;
pub mod io;
pub mod output;
pub mod svg;

pub use cli::run_cli;
