//! `casimir`: batch interface over the corrugated-plate toolkit. Every
//! subcommand reads a flat key-value config, computes one table and
//! emits it as CSV or JSON. Exit codes: 0 success, 1 computation
//! failure, 2 usage or configuration error.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use commands::CommandError;
use config::{parse_config, RunConfig};
use output::Table;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "casimir",
    version,
    about = "Casimir energy, restoring torque and lateral force between corrugated metal plates"
)]
struct Cli {
    /// Stamp the output with the generation time (comment line in CSV, a
    /// field in JSON). Off by default so identical runs emit identical
    /// bytes.
    #[arg(long, global = true)]
    timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Run configuration file, flat `key = value` lines
    #[arg(short, long, value_name = "FILE")]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Second-order energy correction per area at the configured (b, theta)
    Energy(ConfigArg),
    /// Parallel-plane Casimir energy per area with its first two derivatives
    Epp(ConfigArg),
    /// Response function G(k) at k = 2 pi / lambda_C
    Gk(ConfigArg),
    /// Restoring torque per area at the configured (b, theta)
    Torque(ConfigArg),
    /// Peak restoring torque over the rotation angle
    TorqueMax(ConfigArg),
    /// Energy landscape grid over lateral offset b and angle theta
    Landscape {
        #[command(flatten)]
        config: ConfigArg,
        /// Grid points along b, covering two corrugation periods
        #[arg(long, default_value_t = 33)]
        b_steps: usize,
        /// Grid points along theta, symmetric around zero
        #[arg(long, default_value_t = 33)]
        theta_steps: usize,
    },
    /// Peak torque against corrugation wavenumber for all three methods
    SweepK {
        #[command(flatten)]
        config: ConfigArg,
        /// Lowest wavenumber in rad/m (default 0.2/L)
        #[arg(long)]
        k_min: Option<f64>,
        /// Highest wavenumber in rad/m (default 20/L)
        #[arg(long)]
        k_max: Option<f64>,
        /// Number of log-spaced wavenumber samples
        #[arg(long, default_value_t = 40)]
        points: usize,
    },
    /// Wavenumber maximizing k|G(k)| at the configured separation
    Optimize(ConfigArg),
    /// Scattering, PFA and perfect-mirror response side by side
    Compare(ConfigArg),
    /// Run the built-in verification suite, exiting nonzero on failure
    Check,
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Compute(m) => m,
        }
    }
}

fn load(arg: &ConfigArg) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(&arg.config)
        .map_err(|err| Failure::Usage(format!("{}: {err}", arg.config.display())))?;
    let config = parse_config(&text).map_err(|err| Failure::Usage(err.to_string()))?;
    for warning in &config.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let stamp = cli.timestamp.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap_or_default()
            .as_secs()
    });
    type Build = Box<dyn FnOnce(&RunConfig) -> Result<Table, CommandError>>;
    let (arg, build): (&ConfigArg, Build) = match &cli.command {
        Command::Check => return check(),
        Command::Energy(arg) => (arg, Box::new(commands::energy)),
        Command::Epp(arg) => (arg, Box::new(commands::epp)),
        Command::Gk(arg) => (arg, Box::new(commands::gk)),
        Command::Torque(arg) => (arg, Box::new(commands::torque)),
        Command::TorqueMax(arg) => (arg, Box::new(commands::torque_max)),
        Command::Landscape { config, b_steps, theta_steps } => {
            let (b, theta) = (*b_steps, *theta_steps);
            (config, Box::new(move |c| commands::landscape(c, b, theta)))
        }
        Command::SweepK { config, k_min, k_max, points } => {
            let (lo, hi, n) = (*k_min, *k_max, *points);
            (config, Box::new(move |c| commands::sweep_k(c, lo, hi, n)))
        }
        Command::Optimize(arg) => (arg, Box::new(commands::optimize)),
        Command::Compare(arg) => (arg, Box::new(commands::compare)),
    };
    let config = load(arg)?;
    let table = build(&config).map_err(|err| match err {
        CommandError::Unsupported(message) => Failure::Usage(message),
        other => Failure::Compute(other.to_string()),
    })?;
    output::emit(&table, &config, stamp)
        .map_err(|err| Failure::Compute(format!("writing output: {err}")))
}

fn check() -> Result<(), Failure> {
    let all = casimir_core::checks::checks();
    let total = all.len();
    let mut failures = 0usize;
    let mut out = std::io::stdout();
    for check in all {
        let outcome = check();
        let status = if outcome.passed {
            "PASS"
        } else {
            failures += 1;
            "FAIL"
        };
        writeln!(out, "{status} {}: {}", outcome.name, outcome.detail)
            .and_then(|()| out.flush())
            .map_err(|err| Failure::Compute(format!("writing output: {err}")))?;
    }
    if failures == 0 {
        Ok(())
    } else {
        Err(Failure::Compute(format!("{failures} of {total} checks failed")))
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
