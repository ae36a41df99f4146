//! Command-line front end for `poisson-waves-core`.
//!
//! Exit status: 0 on success, 1 when verification fails, 2 for usage or
//! configuration errors, 3 for I/O failures.

mod args;
mod commands;
mod error;
mod output;
pub mod verify;

pub use args::{Cli, Command, Level};
pub use commands::{execute, SweepConfig, DEFAULT_FLOOR_RUNS};
pub use error::CliError;
pub use output::{config_hash, csv_config_hash, CheckResult, RunManifest};

use clap::Parser;
use std::ffi::OsString;

/// Parses `args` (program name first), runs the command and returns the
/// process exit status. Diagnostics go to stderr.
pub fn main_with<I, T>(args: I, out: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("poisson-waves: {e}");
            e.exit_code()
        }
    }
}
