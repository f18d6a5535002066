//! Batch runs: configuration, subcommands and report files.

mod config;
mod io;
mod run;

pub use config::*;
pub use io::{write_atomic, write_with};
pub use run::*;
