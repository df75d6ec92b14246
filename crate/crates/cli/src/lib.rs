//! The `qauth` command: argument parsing, configuration, suite execution
//! and report files.

pub mod args;
pub mod config;
pub mod report;

use std::ffi::OsString;

use clap::Parser;

use crate::args::Cli;
use crate::config::Experiment;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED_CHECK: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

/// Runs `qauth` on a full argument list (program name first) and returns
/// the exit status.
pub fn run_from<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return u8::try_from(e.exit_code()).unwrap_or(EXIT_CONFIG);
        }
    };
    let experiment = match Experiment::from_cli(cli) {
        Ok(e) => e,
        Err(msg) => {
            eprintln!("qauth: config error: {msg}");
            return EXIT_CONFIG;
        }
    };
    let run = match report::run(&experiment) {
        Ok(run) => run,
        Err(msg) => {
            eprintln!("qauth: {msg}");
            return EXIT_CONFIG;
        }
    };
    for r in &run.reports {
        println!("{}", report::line(r));
    }
    let failed = run.reports.iter().filter(|r| !r.pass).count();
    println!(
        "{} checks, {} failed, {:.1}s; reports in {}",
        run.reports.len(),
        failed,
        run.wall_secs,
        experiment.out.display()
    );
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_FAILED_CHECK
    }
}
