//! `nfb`: parameter certificates and experiment drivers for inertial-relaxed
//! nonlinear forward-backward splitting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod problems;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{exit, CliResult};

#[derive(Debug, Parser)]
#[command(name = "nfb", version, about = "Nonlinear forward-backward experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config; each subcommand reads its own table.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override a config key, e.g. `--set param_check.beta=2` (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "nfb-out")]
    out: PathBuf,

    /// Seed for every random draw; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Print step sizes, admissible intervals and a PASS/FAIL line per inequality.
    ParamCheck,
    /// Benchmark FBHF variants on random constrained least-squares instances.
    QpBench,
    /// Restore a blurred, noisy image and report PSNR.
    ImageRestore,
    /// Feasibility and iteration counts over a parameter grid.
    Sweep,
    /// Compare the FPDHF kernel with the generic product-space kernel.
    EquivTest,
}

pub struct Context {
    pub table: toml::Table,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let ctx = Context { table: config::load(cli.config.as_deref(), &cli.set)?, out: cli.out.clone(), seed: cli.seed };
    match cli.command {
        Command::ParamCheck => commands::param_check::run(&ctx),
        Command::QpBench => commands::qp_bench::run(&ctx),
        Command::ImageRestore => commands::restore::run(&ctx),
        Command::Sweep => commands::sweep::run(&ctx),
        Command::EquivTest => commands::equiv::run(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::from(exit::SUCCESS as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
