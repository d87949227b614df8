//! `axisym`: classify cyclic- and phase-symmetric two-qudit states, scan facet
//! grids, and emit CSV or JSON.
//!
//! Exit codes: 0 classified, 2 verdict UNKNOWN, 1 invalid input or I/O error.

mod commands;
mod config;
mod error;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::{ClassifyArgs, CurveArgs, ElinArgs, ScanArgs, SchmidtArgs, TwirlArgs, VerticesArgs, EXIT_INVALID};
use config::Config;
use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "axisym", version, about = "Entanglement classification of cyclic- and phase-symmetric two-qudit states")]
#[command(after_help = "Exit codes: 0 classified, 2 verdict UNKNOWN, 1 invalid input.\n\
    AXISYM_THREADS caps the worker threads used by grid scans.")]
struct Cli {
    /// TOML config with keys seed, restarts, renorm_tol, subdivisions, threads
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify one state as SEPARABLE, BOUND_ENTANGLED, NPT_ENTANGLED or UNKNOWN (JSON report)
    Classify(ClassifyArgs),
    /// Classify every point of a (z, rbar) facet grid (CSV)
    Scan(ScanArgs),
    /// List the 2d - 1 extremal states (CSV)
    Vertices(VerticesArgs),
    /// Project a dense state onto the symmetric family (JSON)
    Twirl(TwirlArgs),
    /// Sample both branches of the d = 3 rank-deficiency curve (CSV)
    Curve(CurveArgs),
    /// Schmidt-number lower and upper bounds for one facet state (JSON) or a grid (CSV)
    Schmidt(SchmidtArgs),
    /// Minimize the reduced linear entropy over phases for one facet state (JSON)
    Elin(ElinArgs),
}

fn run(cli: &Cli) -> CliResult<u8> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Classify(a) => commands::classify(a, &cfg),
        Command::Scan(a) => commands::scan(a, &cfg),
        Command::Vertices(a) => commands::vertices_cmd(a),
        Command::Twirl(a) => commands::twirl(a),
        Command::Curve(a) => commands::curve(a),
        Command::Schmidt(a) => commands::schmidt(a, &cfg),
        Command::Elin(a) => commands::elin(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_INVALID,
            };
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
