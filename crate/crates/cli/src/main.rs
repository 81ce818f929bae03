//! `otwire`: experiment runner for OT over the wiretapped erasure channel.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Rendered, SCHEMA_VERSION};
use config::{
    BoundsArgs, CapacityArgs, CodeEntropyArgs, ExperimentConfig, Format, LeakageArgs, ReplayArgs, SimulateArgs,
};
use error::CliError;

/// Environment variable holding the worker-thread count.
const WORKERS_ENV: &str = "OTWIRE_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "otwire", version, about = "Oblivious transfer over a wiretapped erasure channel")]
struct Cli {
    /// TOML or JSON config; command-line flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run protocol trials and report decoding and provisioning.
    Simulate(SimulateArgs),
    /// Closed-form capacities next to their numerical bounds, at a point or on a grid.
    Capacity(CapacityArgs),
    /// Numerical outer bounds of a broadcast channel.
    Bounds(BoundsArgs),
    /// Exact or Monte Carlo secrecy leakage.
    Leakage(LeakageArgs),
    /// Entropy of random codes restricted to coordinate subsets.
    CodeEntropy(CodeEntropyArgs),
    /// Re-run a captured trial and check its transcript and decoding.
    Replay(ReplayArgs),
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(value) = std::env::var(WORKERS_ENV) else { return Ok(()) };
    let workers: usize = value
        .parse()
        .ok()
        .filter(|&w| w > 0)
        .ok_or_else(|| CliError::Usage(format!("{WORKERS_ENV}={value} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))
}

fn render(out: &Rendered, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&out.json).expect("JSON values serialize");
            text.push('\n');
            Ok(text.into_bytes())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| CliError::Io { context: "formatting CSV".into(), source: e.into() };
            let mut header = vec!["schema_version"];
            header.extend(&out.table.header);
            w.write_record(&header).map_err(csv_err)?;
            let version = SCHEMA_VERSION.to_string();
            for row in &out.table.rows {
                w.write_record(std::iter::once(&version).chain(row)).map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| CliError::Io { context: "formatting CSV".into(), source: e.into_error() })
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_workers()?;
    let file = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let format = cli.format.or(file.format).unwrap_or(Format::Json);
    let output = cli.output.or(file.output);
    let (rendered, ok) = match cli.command {
        Command::Simulate(a) => (commands::simulate(&a.layer(file.simulate))?, true),
        Command::Capacity(a) => (commands::capacity(&a.layer(file.capacity))?, true),
        Command::Bounds(a) => (commands::bounds(&a.layer(file.bounds))?, true),
        Command::Leakage(a) => (commands::leakage(&a.layer(file.leakage))?, true),
        Command::CodeEntropy(a) => (commands::code_entropy(&a.layer(file.code_entropy))?, true),
        Command::Replay(a) => commands::replay(&a.layer(file.replay))?,
    };
    let bytes = render(&rendered, format)?;
    match output {
        Some(path) => std::fs::write(&path, bytes)
            .map_err(|source| CliError::Io { context: format!("writing {}", path.display()), source })?,
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|source| CliError::Io { context: "writing stdout".into(), source })?,
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: {}", CliError::Verification("replayed run does not match its record".into()));
            ExitCode::from(error::EXIT_FAILURE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
