use std::process::ExitCode;

use clap::Parser;
use fcab_cli::{dispatch, init_logging, CliConfig};

fn main() -> ExitCode {
    init_logging();
    let cfg = match CliConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    ExitCode::from(dispatch(&cfg))
}
