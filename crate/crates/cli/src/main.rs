//! `tomolens run <config>` turns a scenario file into CSV and plot-data
//! artifacts plus a manifest; `tomolens audit` runs the invariant battery.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 numerical guard
//! failure, 3 audit failure.

mod config;
mod output;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tomolens::audit::{self, AuditBattery};

pub const THREADS_ENV: &str = "TOMOLENS_THREADS";

#[derive(Parser)]
#[command(name = "tomolens", version, about = "Optical tomogram scenarios and invariant audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a TOML config file.
    Run { config: PathBuf },
    /// Run the invariant suite on the default state battery.
    Audit,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    /// A numerical guard tripped at the named parameter point.
    Guard { point: String, source: tomolens::Error },
    OracleMismatch(Vec<String>),
    AuditFailed(Vec<String>),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
            CliError::Guard { point, source } => write!(f, "numerical guard failed at {point}: {source}"),
            CliError::OracleMismatch(points) => {
                write!(f, "oracle audit failed at {} point(s):", points.len())?;
                for p in points {
                    write!(f, "\n  {p}")?;
                }
                Ok(())
            }
            CliError::AuditFailed(names) => {
                write!(f, "audit failed: {} check(s):", names.len())?;
                for n in names {
                    write!(f, "\n  {n}")?;
                }
                Ok(())
            }
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Guard { .. } | CliError::OracleMismatch(_) => 2,
            CliError::AuditFailed(_) => 3,
        }
    }
}

/// Worker count from TOMOLENS_THREADS; unset means rayon's default.
fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Config(format!("{THREADS_ENV}: {e}"))),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV}: expected a positive integer, got {v:?}"))),
        },
    }
}

fn pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))
}

fn run(config_path: &PathBuf) -> Result<(), CliError> {
    let plan = config::load(config_path)?;
    let pool = pool()?;
    let outcome = pool.install(|| scenarios::run(&plan))?;
    output::write_all(&plan, config_path, &outcome.artifacts)?;
    println!(
        "{}: wrote {} artifact(s) and {} to {}",
        plan.scenario.as_str(),
        outcome.artifacts.len(),
        output::MANIFEST,
        plan.output_dir.display()
    );
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn audit() -> Result<(), CliError> {
    let pool = pool()?;
    let report = pool.install(|| audit::run(&AuditBattery::default()));
    print!("{}", report.table());
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::AuditFailed(
            report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect(),
        ))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => run(config),
        Command::Audit => audit(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tomolens: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
