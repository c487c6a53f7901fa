//! `wgqed` command-line front end.

use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod config;
mod error;
mod output;

use args::{Cli, Command, Format};
use config::{FileConfig, RunConfig};
use error::CliResult;

fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.common.config {
        Some(path) => config::load(path)?,
        None => FileConfig::default(),
    };
    let default_format = match cli.command {
        Command::Prepare(_) => Format::Json,
        _ => Format::Csv,
    };
    let cfg = RunConfig::merge(&cli.common, &file, default_format)?;
    let out = match &cli.command {
        Command::Rates(a) => commands::rates::run(&cfg, a, &file.rates)?,
        Command::Evolve(a) => commands::evolve::run(&cfg, a, &file.evolve)?,
        Command::Scan(a) => commands::scan::run(&cfg, a, &file.scan)?,
        Command::Prepare(a) => commands::prepare::run(&cfg, a, &file.prepare)?,
        Command::Mix(a) => commands::mix::run(&cfg, a, &file.mix)?,
        Command::Cpw(a) => commands::cpw::run(&cfg, a, &file.cpw)?,
    };
    output::emit(cfg.out.as_deref(), &out.content)?;
    if let Some(summary) = out.summary {
        eprintln!("{summary}");
    }
    match out.deferred {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
