//! Batch front-end for `gaussgrasp`: the `gaussgrasp` binary is a thin
//! wrapper around [`run`].

pub mod args;
pub mod commands;
pub mod config;
pub mod data;
pub mod error;

use args::{Cli, Command};
use config::FileConfig;
pub use error::{CliError, CliResult};

pub fn run(cli: &Cli) -> CliResult<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let jobs = file.jobs(cli.jobs)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))?;
    match &cli.command {
        Command::Gen(a) => commands::gen(a, &file, &pool),
        Command::Extract(a) => commands::extract(a, &file, &pool),
        Command::Loss(a) => commands::loss_cmd(a, &file, &pool),
        Command::Eval(a) => commands::eval(a, &file, &pool),
        Command::Oracle(a) => commands::oracle(a, &file, &pool),
        Command::Synth(a) => commands::synth(a, &file, &pool),
        Command::Viz(a) => commands::viz(a, &file, &pool),
    }
}
