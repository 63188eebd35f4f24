use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "entbound",
    version,
    about = "SDP bounds on distillable entanglement"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate measures on a state file.
    Compute {
        /// JSON state document.
        #[arg(long)]
        state: PathBuf,
        /// Comma-separated list: en, ew, e0, fgamma:k=<k>, witness.
        #[arg(long)]
        measures: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Tabulate measures over a one-parameter family as CSV.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        measures: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a consistency suite: paper-values, duality, additivity,
    /// monotonicity, sandwich or all.
    Verify {
        #[arg(long)]
        suite: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Family {
    SigmaR,
    RhoAlpha,
}
