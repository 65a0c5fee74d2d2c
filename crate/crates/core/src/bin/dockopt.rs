use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dockopt::cli::{self, Axis, CliError, ExitStatus, RunConfig};

/// Co-design optimization of an AUV and its docking station.
#[derive(Parser)]
#[command(name = "dockopt", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one design problem and print a report.
    Solve {
        /// TOML configuration; defaults describe the general case.
        config: Option<PathBuf>,
        /// Write the JSON result record here.
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// Solve a grid of weight vectors and emit a CSV table.
    Sweep {
        config: Option<PathBuf>,
        /// `name:start:end:steps`, e.g. `q:1:2:5`; give once or twice.
        #[arg(long = "axis", required = true, num_args = 1)]
        axes: Vec<String>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit surrogate coefficients to the scenario's reference optimum.
    Calibrate { config: Option<PathBuf> },
    /// Monte Carlo docking simulation for the [simulation] section.
    Simulate { config: Option<PathBuf> },
    /// Verify analytic gradients against central differences.
    CheckGradients { config: Option<PathBuf> },
}

fn load(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => RunConfig::load(p),
        None => RunConfig::parse("", "defaults"),
    }
}

fn run(args: Args) -> Result<ExitStatus, CliError> {
    let mut out = std::io::stdout().lock();
    match args.command {
        Command::Solve { config, result } => {
            let mut cfg = load(&config)?;
            if result.is_some() {
                cfg.output.result = result;
            }
            cli::solve_with(&cfg, &mut out)
        }
        Command::Sweep { config, axes, output } => {
            let mut cfg = load(&config)?;
            if output.is_some() {
                cfg.output.csv = output;
            }
            let axes = axes.iter().map(|a| a.parse()).collect::<Result<Vec<Axis>, _>>()?;
            cli::sweep_with(&cfg, &axes, &mut out)
        }
        Command::Calibrate { config } => {
            cli::calibrate_with(&load(&config)?, &mut out).map(|_| ExitStatus::Success)
        }
        Command::Simulate { config } => {
            cli::simulate_with(&load(&config)?, &mut out).map(|_| ExitStatus::Success)
        }
        Command::CheckGradients { config } => cli::check_gradients_with(&load(&config)?, &mut out),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            // Help and version requests are not usage errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(args);
    // A closed downstream pipe ends output early; it is not a failure.
    if let Err(CliError::Io { source, .. }) = &result {
        if source.kind() == std::io::ErrorKind::BrokenPipe {
            return ExitCode::SUCCESS;
        }
    }
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    ExitCode::from(cli::exit_code(&result) as u8)
}
