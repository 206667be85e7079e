//! `quatkmp` command-line front end.

mod commands;
mod config;
mod error;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use error::CliError;
use files::Format;

#[derive(Parser, Debug)]
#[command(name = "quatkmp", version, about = "Learn, adapt and evaluate orientation trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate synthetic demonstrations.
    GenDemos,
    /// Learn a model from demonstrations.
    Train {
        #[arg(long)]
        demos: PathBuf,
    },
    /// Adapt a model to the config's desired points.
    Adapt {
        #[arg(long)]
        model: PathBuf,
    },
    /// Evaluate a model over the config's rollout grid or inputs.
    Rollout {
        #[arg(long)]
        model: PathBuf,
    },
    /// Smoothness costs and desired-point errors of a trajectory.
    Eval {
        #[arg(long)]
        trajectory: PathBuf,
    },
    /// Check angular velocity of constant and linear tangent increments.
    VerifyTheorems,
    /// Refit over the config's smoothness weights and report costs.
    SweepLambdaA {
        #[arg(long)]
        model: PathBuf,
    },
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli.out.as_deref();
    let fmt = cli.format;
    match &cli.command {
        Command::GenDemos => commands::gen_demos(&cfg, out, fmt),
        Command::Train { demos } => commands::train(&cfg, demos, out, fmt),
        Command::Adapt { model } => commands::adapt(&cfg, model, out, fmt),
        Command::Rollout { model } => commands::rollout(&cfg, model, out, fmt),
        Command::Eval { trajectory } => commands::eval(&cfg, trajectory, out, fmt),
        Command::VerifyTheorems => commands::theorems(&cfg, out, fmt),
        Command::SweepLambdaA { model } => commands::sweep(&cfg, model, out, fmt),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QUATKMP_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
