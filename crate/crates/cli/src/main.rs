// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod compare;
mod config;
mod error;
mod output;
mod run;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weakwave::kernels::CATALOG;

use crate::compare::OracleKind;
use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "weakwave", version, about = "Run weak-asymptotics scenarios and convergence studies")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, short = 'j', global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a config and write its artifacts.
    Run {
        #[arg(long, short)]
        config: PathBuf,
        /// Output directory; overrides `run.output_dir`.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Comma-separated ε list replacing `run.epsilons`.
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
        /// Replace a non-empty output directory.
        #[arg(long)]
        force: bool,
    },
    /// Distances between a run's profiles and an oracle solution.
    Compare {
        run_dir: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        oracle: OracleKind,
        /// Godunov grid cells.
        #[arg(long, default_value_t = 4000)]
        nx: usize,
        /// Write the report here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the mollifier catalog.
    ListMollifiers,
    /// Parse and validate a config without running it.
    ValidateConfig {
        #[arg(long, short)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
    },
}

fn read_config(path: &PathBuf) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn dispatch(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    }
    match cli.command {
        Command::Run {
            config,
            output,
            epsilons,
            force,
        } => {
            let plan = config::load(&read_config(&config)?, epsilons)?;
            let dir = output
                .or_else(|| plan.config.run.output_dir.clone())
                .ok_or_else(|| CliError::Config("no output directory: pass --output or set run.output_dir".into()))?;
            let artifacts = run::execute(&plan)?;
            artifacts.commit(&dir, force)?;
            println!("wrote {} files to {}", artifacts.files.len(), dir.display());
        }
        Command::Compare {
            run_dir,
            oracle,
            nx,
            output,
        } => {
            let report = output::to_json(&compare::compare(&run_dir, oracle, nx)?);
            match output {
                Some(p) => fs::write(&p, report).map_err(CliError::io(&p))?,
                None => print!("{report}"),
            }
        }
        Command::ListMollifiers => {
            println!("{:<12} {:<14} {:>7}  description", "name", "kind", "radius");
            for e in CATALOG {
                println!("{:<12} {:<14} {:>7}  {}", e.name, e.kind.as_str(), e.radius, e.description);
            }
        }
        Command::ValidateConfig { config, epsilons } => {
            let plan = config::load(&read_config(&config)?, epsilons)?;
            println!("{}: valid {} config", config.display(), plan.config.run.scenario.name());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
