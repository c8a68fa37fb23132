use std::path::PathBuf;
use std::process::ExitCode;

use cers_core::scenario::{parse_config, run_scenario, ScenarioKind};
use cers_core::Error;
use clap::Parser;

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

/// Spontaneous and correlation-enhanced Raman scattering scenarios.
#[derive(Debug, Parser)]
#[command(name = "cers", version)]
struct Cli {
    /// srs, cers, sweep-phase, sweep-seed or validate
    scenario: ScenarioKind,
    /// Configuration file (`key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; stdout when omitted and the config has no `out`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use N cells in both space and time
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Number of Δφ or attenuation samples
    #[arg(long, value_name = "K")]
    sweep_points: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    cfg.scenario = cli.scenario;
    if let Some(n) = cli.grid {
        cfg.n_z = n;
        cfg.n_t = n;
    }
    if let Some(k) = cli.sweep_points {
        cfg.sweep_points = k;
    }
    if cli.out.is_some() {
        cfg.out = cli.out;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }

    let output = match run_scenario(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {} scenario failed: {e}", cfg.scenario.tag());
            let code = match e {
                Error::Config { .. } | Error::InvalidParameter { .. } => EXIT_CONFIG,
                _ => EXIT_SOLVER,
            };
            return ExitCode::from(code);
        }
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &output.csv) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_SOLVER);
            }
        }
        None => print!("{}", output.csv),
    }
    match output.verdict {
        Some(false) => {
            eprintln!("validation failed");
            ExitCode::from(EXIT_VALIDATION)
        }
        _ => ExitCode::SUCCESS,
    }
}
