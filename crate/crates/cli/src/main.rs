//! `specwell`: reproducible runs of the spectral computations, written as
//! CSV, JSON or SVG.

mod commands;
mod config;
mod error;
mod report;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Context, Outcome};
use config::{resolve_tol, ConfigFile, Format, Num, TOL_ENV};
use error::{invalid, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "specwell",
    version,
    about = "Energy levels of the square well and the delta-barrier box as analytic functions of the coupling"
)]
struct Cli {
    /// Plain-text `key = value` file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Destination file (written atomically); stdout when absent.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    /// Acceptance threshold for scaled residuals.
    #[arg(long, global = true)]
    tol: Option<Num>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Real bound levels at one coupling value.
    Spectrum(commands::spectrum::SpectrumArgs),
    /// Branch points of the energy surfaces.
    BranchPoints(commands::branch_points::BranchPointArgs),
    /// Continue one level along a path in the complex coupling plane.
    Continue(commands::continuation::ContinueArgs),
    /// Strong- or weak-coupling series of one level.
    Series(commands::series::SeriesArgs),
    /// Scattering poles or transmission profiles.
    Scatter(commands::scatter::ScatterArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let tol_flag = match cli.tol {
        Some(Num(t)) if t <= 0.0 => {
            return Err(invalid(format!("--tol must be positive, got {t}")))
        }
        other => other.map(|Num(t)| t),
    };
    let tol = resolve_tol(tol_flag, &file, std::env::var(TOL_ENV).ok())?;
    let format = file.pick(cli.format, "format")?.unwrap_or(Format::Csv);
    let output = file.pick(cli.output, "output")?;
    let ctx = Context { file, tol };
    let Outcome { report, plot } = match cli.command {
        Command::Spectrum(a) => commands::spectrum::run(a, &ctx)?,
        Command::BranchPoints(a) => commands::branch_points::run(a, &ctx)?,
        Command::Continue(a) => commands::continuation::run(a, &ctx)?,
        Command::Series(a) => commands::series::run(a, &ctx)?,
        Command::Scatter(a) => commands::scatter::run(a, &ctx)?,
    };
    let text = match format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json(),
        Format::Svg => plot.render(),
    };
    report::emit(&text, output.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("specwell: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
