//! Experiment runner for the invasiveness laboratory.
//!
//! Exit codes: 0 success, 1 usage error, 2 invariant/model violation,
//! 3 I/O failure.

mod cli;
mod commands;
mod config;
mod output;
mod plot;

use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{Cli, Command, RunArgs};
use config::SweepConfig;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };

    let started = Instant::now();
    let result = dispatch(cli);
    match result {
        Ok(()) => {
            eprintln!("# wall-clock: {:.3}s", started.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Coherence(args) => with_config(&args, commands::run_coherence),
        Command::Invasiveness(args) => with_config(&args, commands::run_invasiveness),
        Command::Lgi(args) => {
            let cfg = setup(&args.run)?;
            commands::run_lgi(&cfg, args.scan_chi, args.nbar_max)
        }
        Command::P3Dump(args) => with_config(&args, commands::run_p3_dump),
        Command::Checks(args) => with_config(&args, commands::run_checks),
        Command::Plot(args) => plot::run_plot(&args),
    }
}

fn with_config(
    args: &RunArgs,
    f: impl Fn(&SweepConfig) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    let cfg = setup(args)?;
    f(&cfg)
}

/// Resolve the configuration and size the worker pool. The pool is global
/// and sized once per process; results are identical for any size.
fn setup(args: &RunArgs) -> anyhow::Result<SweepConfig> {
    let cfg = SweepConfig::resolve(args).map_err(config::usage_error)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.threads)
        .build_global()
        .ok();
    Ok(cfg)
}

fn classify(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 3;
        }
        if let Some(lab) = cause.downcast_ref::<invlab::Error>() {
            return match lab {
                invlab::Error::InvalidParameter(_) => 1,
                _ => 2,
            };
        }
    }
    if e.to_string().starts_with("usage error") {
        return 1;
    }
    2
}
