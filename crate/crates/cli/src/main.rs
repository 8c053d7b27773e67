use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracctl_cli::commands::{gramian, simulate, sweep, validate};
use fracctl_cli::{CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "fracctl", version, about = "Fractional evolution inclusions: simulation, Gramians and approximate controls")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Experiment configuration (TOML).
    config: PathBuf,
    /// Override a scalar entry, e.g. `--set solver.steps=256`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite and print one line per check.
    Validate(ConfigArgs),
    /// Mild solution with the L1 cross-check gap.
    Simulate {
        #[command(flatten)]
        args: ConfigArgs,
        /// Constant forcing coefficient `MODE=VALUE`, applied through H.
        #[arg(long, value_name = "MODE=VALUE", value_parser = parse_mode)]
        forcing: Vec<(usize, f64)>,
        /// Constant control coefficient `MODE=VALUE`, applied through B.
        #[arg(long, value_name = "MODE=VALUE", value_parser = parse_mode)]
        control: Vec<(usize, f64)>,
    },
    /// Assemble and audit the controllability Gramian.
    Gramian(ConfigArgs),
    /// Regularised controls over the configured epsilon list.
    Sweep(ConfigArgs),
}

fn parse_mode(s: &str) -> Result<(usize, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected MODE=VALUE")?;
    Ok((k.trim().parse().map_err(|e| format!("{e}"))?, v.trim().parse().map_err(|e| format!("{e}"))?))
}

fn load(args: &ConfigArgs) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::load(&args.config, &args.overrides)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate(args) => load(args).and_then(|c| validate::run(&c)),
        Command::Simulate { args, forcing, control } => load(args).and_then(|c| {
            let inputs = simulate::Inputs { forcing: forcing.clone(), control: control.clone() };
            simulate::run(&c, &inputs)
        }),
        Command::Gramian(args) => load(args).and_then(|c| gramian::run(&c)),
        Command::Sweep(args) => load(args).and_then(|c| sweep::run(&c)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
