//! Command-line driver: evaluate first integrals at points, integrate
//! geodesics and report conservation, run the Rapcsák equivalence test and
//! cross-validate against the oracles.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{Format, Overrides, RunConfig};
use error::{CliError, EXIT_FAIL, EXIT_PASS};

#[derive(Debug, Parser)]
#[command(name = "finsler", version, about = "First integrals of projectively equivalent Finsler metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Random seed for sampled points (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Output format (overrides the config).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Verdict tolerance of the chosen command (overrides the config).
    #[arg(long, global = true, value_name = "X")]
    pub tolerance: Option<f64>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// F, F̃, g, h, H, f_α, δ_α, μ, I₀, I₁ and K at each point, with identity checks.
    Evaluate,
    /// Integrate geodesics and report the drift of every f_α and of F².
    Geodesic,
    /// Rapcsák residual of the pair over the sample points.
    Verify,
    /// Cross-validate against the interpolation, permutation-sum and finite-difference oracles.
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evaluate => "evaluate",
            Command::Geodesic => "geodesic",
            Command::Verify => "verify",
            Command::Oracle => "oracle",
        }
    }
}

/// Runs one invocation and returns its exit code. Reports go to `--out` or
/// stdout; errors go to stderr as a single JSON object.
pub fn run(cli: &Cli) -> u8 {
    match execute(cli) {
        Ok(passed) => {
            if passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let body = serde_json::json!({
                "command": cli.command.name(),
                "error": e.kind(),
                "message": e.message(),
            });
            eprintln!("{body}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let overrides = Overrides {
        seed: cli.seed,
        format: cli.format,
        tolerance: cli.tolerance,
    };
    let setup = config.resolve(&overrides)?;
    let outcome = match cli.command {
        Command::Evaluate => commands::evaluate(&setup)?,
        Command::Geodesic => commands::geodesic(&setup)?,
        Command::Verify => commands::verify(&setup)?,
        Command::Oracle => commands::oracle(&setup)?,
    };
    let bytes = outcome.render(setup.config.format)?;
    report::emit(&bytes, cli.out.as_deref())?;
    eprintln!(
        "{}: {}",
        cli.command.name(),
        if outcome.passed { "pass" } else { "fail" }
    );
    Ok(outcome.passed)
}
