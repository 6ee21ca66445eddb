//! Library surface of the `efdm` command-line tool; the binary in `main.rs`
//! is a thin wrapper so integration tests can drive the same code paths.

pub mod args;
pub mod bench;
pub mod error;
pub mod image_cmd;
pub mod report;
pub mod stats_cmd;
pub mod tensor_cmd;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::CliError;

/// Runs one parsed invocation.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Image(args) => image_cmd::run(&args),
        Command::Tensor(args) => tensor_cmd::run(&args),
        Command::Stats(args) => stats_cmd::run(&args),
        Command::Bench(args) => bench::run(&args),
    }
}

/// Parses arguments and runs, mapping every outcome to an exit code:
/// 0 success, 1 usage error, 2 I/O error, 3 contract violation.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap routes help to stdout and errors to stderr on its own.
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(CliError::Pipe) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
