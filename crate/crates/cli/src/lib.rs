//! Command-line front end for `matching-ekr`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod report;

pub use cli::Cli;
pub use commands::{run, Outcome};
