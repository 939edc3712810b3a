use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use uncertain_reach::bounds::{BoundMethod, NormKind};
use uncertain_reach::cli::{self, ReachMethod, TimeWindow};
use uncertain_reach::error::Result;
use uncertain_reach::robustness::{BudgetScheme, SafetyEngine, ThresholdConfig, ThresholdStatus, DEFAULT_CAP};

#[derive(Parser)]
#[command(name = "ureach", version, about = "Reachability of linear systems with interval-matrix uncertainty")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reach-set bounding boxes per step as CSV.
    Reach {
        model: PathBuf,
        /// numeric | kagstrom1 | kagstrom2 | loan
        #[arg(long, default_value = "numeric")]
        method: ReachMethod,
        /// two | frobenius (bound methods only)
        #[arg(long, default_value = "frobenius")]
        norm: NormKind,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Only write rows with time >= FROM.
        #[arg(long)]
        from: Option<f64>,
        /// Only write rows with time <= TO.
        #[arg(long)]
        to: Option<f64>,
    },
    /// Rank dynamics-matrix cells by singular-value sensitivity (JSON).
    Order {
        model: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Rank on exp(A h) instead of A.
        #[arg(long)]
        discrete: bool,
    },
    /// Search the largest safe perturbation budget (JSON).
    Robust {
        model: PathBuf,
        /// Cell `row,col` to perturb; repeatable. Defaults to the model's uncertain cells.
        #[arg(long = "cell", value_parser = cli::parse_cell)]
        cells: Vec<(usize, usize)>,
        /// proportional | proportional-literal | harmonic | equal
        #[arg(long, default_value = "equal")]
        scheme: BudgetScheme,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Decide safety with a closed-form bound instead of the numeric recurrence.
        #[arg(long)]
        bound: Option<BoundMethod>,
        #[arg(long, default_value = "frobenius")]
        norm: NormKind,
        /// Rank cells on exp(A h) instead of A.
        #[arg(long)]
        discrete_order: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Interval norms of the model's uncertainty (JSON).
    Norms {
        model: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn run(args: Args) -> Result<()> {
    match args.command {
        Command::Reach { model, method, norm, out, from, to } => {
            let summary = cli::cmd_reach(&model, method, norm, out.as_deref(), TimeWindow { from, to })?;
            if out.is_some() {
                println!("{summary}");
            } else {
                eprintln!("{summary}");
            }
        }
        Command::Order { model, out, discrete } => {
            cli::cmd_order(&model, out.as_deref(), discrete)?;
        }
        Command::Robust {
            model,
            cells,
            scheme,
            step,
            cap,
            bound,
            norm,
            discrete_order,
            out,
        } => {
            let mut config = ThresholdConfig::new(scheme, step);
            config.cap = cap;
            config.order_discrete = discrete_order;
            if let Some(method) = bound {
                config.engine = SafetyEngine::Symbolic { method, norm };
            }
            let cells = (!cells.is_empty()).then_some(cells.as_slice());
            let r = cli::cmd_robust(&model, cells, &config, out.as_deref())?;
            if r.report.status == ThresholdStatus::CapReached {
                eprintln!("warning: no unsafe budget within {cap} steps; reported norm is a lower bound");
            }
        }
        Command::Norms { model, out } => {
            cli::cmd_norms(&model, out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
