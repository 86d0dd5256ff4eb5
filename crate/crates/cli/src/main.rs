//! `dlra`: runs the low-rank Tucker integrators on the built-in experiments
//! and writes CSV series.
//!
//! Exit status: 0 on success, 1 on I/O errors, 2 on invalid arguments or
//! configuration, 3 when a low-rank run breaks down numerically.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use dlra_core::integrator::{Regularization, Scheme};
use dlra_core::problems::ProblemKind;
use dlra_core::runner::{
    convergence_study, run_experiment, stability_comparison, write_convergence_csv, write_csv,
    write_stability_csv, ConfigOverrides, RunConfig, RunStatus,
};
use dlra_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "dlra",
    version,
    about = "Dynamical low-rank Tucker integration experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one configuration and write `t,rel_error,rel_defect,sweeps,step_ms`.
    Run {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Final-time error for several step sizes and the fitted log-log slope.
    Convergence {
        #[command(flatten)]
        common: CommonArgs,
        /// Step sizes, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "1e-2,5e-3,2.5e-3,1.25e-3"
        )]
        steps: Vec<f64>,
    },
    /// Final-time errors of several schemes across uniform ranks and step sizes.
    Stability {
        #[command(flatten)]
        common: CommonArgs,
        /// Uniform ranks, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "4,8,12,16")]
        ranks: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4")]
        steps: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "euler,gauged-reference")]
        schemes: Vec<Scheme>,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// TOML file with any subset of the run keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// koch-lubich, rotating, heat or reaction.
    #[arg(long)]
    experiment: Option<ProblemKind>,
    #[arg(long)]
    dim: Option<usize>,
    /// Mode size.
    #[arg(long)]
    size: Option<usize>,
    /// One rank for all modes, or one per mode, comma separated.
    #[arg(long, value_delimiter = ',')]
    rank: Option<Vec<usize>>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// euler, improved-euler or gauged-reference.
    #[arg(long)]
    scheme: Option<Scheme>,
    /// off, h2 or a fixed weight.
    #[arg(long)]
    reg: Option<Regularization>,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative defect change that ends the sweeps.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// Log every n-th step.
    #[arg(long)]
    stride: Option<usize>,
    /// Fill the step_ms column. Makes the output non-reproducible.
    #[arg(long)]
    timing: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn config(&self) -> Result<RunConfig, Failure> {
        let text = match &self.config {
            Some(path) => Some(
                fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))
                    .map_err(Failure::Io)?,
            ),
            None => None,
        };
        let overrides = ConfigOverrides {
            experiment: self.experiment,
            dim: self.dim,
            size: self.size,
            ranks: self.rank.clone(),
            step: self.step,
            horizon: self.horizon,
            eps: self.eps,
            scheme: self.scheme,
            regularization: self.reg,
            seed: self.seed,
            tolerance: self.tol,
            max_sweeps: self.max_sweeps,
            stride: self.stride,
            timing: self.timing.then_some(true),
        };
        RunConfig::resolve(text.as_deref(), &overrides).map_err(Failure::Config)
    }

    fn output(&self) -> Result<Box<dyn Write>, Failure> {
        match &self.out {
            Some(path) => {
                let file = fs::File::create(path)
                    .with_context(|| format!("creating {}", path.display()))
                    .map_err(Failure::Io)?;
                Ok(Box::new(io::BufWriter::new(file)))
            }
            None => Ok(Box::new(io::stdout().lock())),
        }
    }
}

enum Failure {
    Io(anyhow::Error),
    Config(Error),
    Numerical(String),
}

impl Failure {
    fn from_core(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_)
            | Error::InvalidRank(_)
            | Error::InvalidShape(_)
            | Error::Infeasible(_) => Failure::Config(e),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { common } => {
            let cfg = common.config()?;
            let outcome = run_experiment(&cfg).map_err(Failure::from_core)?;
            write_csv(&outcome, common.output()?).map_err(|e| Failure::Io(e.into()))?;
            if let Some(f) = &outcome.failure {
                return Err(Failure::Numerical(format!(
                    "breakdown in the step starting at t = {}: {}",
                    f.t, f.error
                )));
            }
        }
        Command::Convergence { common, steps } => {
            let cfg = common.config()?;
            let study = convergence_study(&cfg, &steps).map_err(Failure::from_core)?;
            write_convergence_csv(&study, common.output()?).map_err(|e| Failure::Io(e.into()))?;
        }
        Command::Stability {
            common,
            ranks,
            steps,
            schemes,
        } => {
            let cfg = common.config()?;
            let rows =
                stability_comparison(&cfg, &ranks, &steps, &schemes).map_err(Failure::from_core)?;
            write_stability_csv(&rows, common.output()?).map_err(|e| Failure::Io(e.into()))?;
            let broken: Vec<String> = rows
                .iter()
                .filter(|r| r.scheme != Scheme::Gauged && r.status != RunStatus::Completed)
                .map(|r| {
                    format!(
                        "rank {} h {} {}: {}",
                        r.rank,
                        r.step,
                        r.scheme,
                        r.status.name()
                    )
                })
                .collect();
            if !broken.is_empty() {
                return Err(Failure::Numerical(broken.join("; ")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("dlra: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("dlra: invalid configuration: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("dlra: {msg}");
            ExitCode::from(3)
        }
    }
}
