//! `histnero` command-line front end. Exit status: 0 on success, 1 on data
//! or validation errors, 2 on usage errors. Log verbosity comes from
//! `HISTNERO_LOG` (default `warn`).

mod args;
mod commands;
mod config;
mod manifest;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::{Cli, Command};
use config::RunConfig;

/// Bad flag combinations clap cannot express; reported with exit status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(String);

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Stats(a) => commands::stats(a),
        Command::Validate(a) => commands::validate_cmd(a),
        Command::Convert(a) => commands::convert(a),
        Command::Split(a) => commands::split(a, cfg),
        Command::Iaa(a) => commands::iaa(a),
        Command::Tfidf(a) => commands::tfidf(a),
        Command::Train(a) => commands::train_cmd(a, cfg),
        Command::Eval(a) => commands::eval_cmd(a),
        Command::Crossregion(a) => commands::crossregion(a, cfg),
        Command::ExportEmbeddings(a) => commands::export_embeddings(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HISTNERO_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}\n\n{}\n\nFor more information, try '--help'.", Cli::command().render_usage());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
