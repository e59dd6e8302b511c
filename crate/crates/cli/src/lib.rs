//! Batch driver for birth-and-growth crystallization fields: configuration,
//! persistence (JMF1 fields, CSV, JSON, PGM/PNG) and subcommand dispatch on
//! top of `jmfield-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod format;
pub mod image;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{Context, Outcome};
pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "jmfield", version, about = "Simulate and analyse birth-and-growth crystallization fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides JMFIELD_OUT_DIR).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Overrides the configured replicate count.
    #[arg(long, global = true, value_name = "N")]
    pub replicates: Option<usize>,
    /// Worker cap; outputs do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the growth-model assumptions on sampled configurations.
    Check,
    /// Simulate one field realization and write JMF1, sidecar and images.
    Simulate,
    /// Compare the empirical law of xi(0) with exp(-F(t)).
    Cdf,
    /// Evaluate mixing-rate upper and lower bounds over an r grid.
    Bounds,
    /// Monte Carlo coupling, event-gap or covariance-decay estimates.
    Mixing,
    /// Render images from a JMF1 file.
    Render {
        /// Field file; defaults to the configured input or `<out>/field.jmf`.
        input: Option<PathBuf>,
    },
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Loads the configuration, applies flag overrides and runs the subcommand.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let out_dir = output::resolve_out_dir(cli.out.as_deref());
    let threads = cli.threads.unwrap_or_else(default_threads);
    if threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let config = match &cli.config {
        Some(p) => Some(RunConfig::load(p)?),
        None => None,
    };
    if let Command::Render { input } = &cli.command {
        let slice = config.as_ref().and_then(|c| c.render.slice);
        let input = input
            .clone()
            .or_else(|| config.as_ref().and_then(|c| c.render.input.clone()))
            .unwrap_or_else(|| out_dir.join("field.jmf"));
        return commands::cmd_render(&input, &out_dir, slice);
    }
    let mut config = config.ok_or_else(|| CliError::Usage("--config PATH is required".into()))?;
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(n) = cli.replicates {
        config.replicates = n;
    }
    config.validate()?;
    let ctx = Context::new(config, out_dir, threads)?;
    match cli.command {
        Command::Check => commands::cmd_check(&ctx),
        Command::Simulate => commands::cmd_simulate(&ctx),
        Command::Cdf => commands::cmd_cdf(&ctx),
        Command::Bounds => commands::cmd_bounds(&ctx),
        Command::Mixing => commands::cmd_mixing(&ctx),
        Command::Render { .. } => unreachable!("handled above"),
    }
}
