//! Command-line pipeline: simulate, annotate, analyze, report.

pub mod analyze;
pub mod annotate;
pub mod config;
pub mod report;
pub mod simulate;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use disputebench_core::gateway::ProviderRegistry;

#[derive(Debug, Parser)]
#[command(
    name = "disputebench",
    version,
    about = "Personality-conditioned dispute negotiation pipeline"
)]
pub struct Cli {
    /// TOML file with [simulate], [annotate] and [analyze] sections; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run negotiations between two agents and write a corpus.
    Simulate(simulate::SimulateArgs),
    /// Label every utterance segment with an IRP strategy.
    Annotate(annotate::AnnotateArgs),
    /// Build speaker records, regressions, heatmap and stage tables.
    Analyze(analyze::AnalyzeArgs),
    /// Compare regression tables from several analyses.
    Report(report::ReportArgs),
}

pub fn run(cli: Cli) -> Result<()> {
    let registry = ProviderRegistry::with_defaults();
    let config = cli.config.as_deref();
    match &cli.command {
        Command::Simulate(a) => simulate::run(a, config, &registry),
        Command::Annotate(a) => annotate::run(a, config, &registry),
        Command::Analyze(a) => analyze::run(a, config),
        Command::Report(a) => report::run(a),
    }
}

/// `corpus.jsonl` -> `corpus.jsonl.<suffix>`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(format!(".{suffix}"));
    path.with_file_name(name)
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
