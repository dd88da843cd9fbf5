use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use degenex_cli::{parse_bracket, parse_domain, run, CliError, Command, JobSpec, MethodArg, Options, StrategyArg, WeightsArg};
use degenex_core::potential::GridResolution;

#[derive(Parser, Debug)]
#[command(name = "degenex", version, about = "Error exponents of tensor degenerations")]
struct Args {
    /// Absolute tolerance for validating degeneration coefficients.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Rate grid size for `tradeoff`, or radial grid size for `fekete`
    /// (twice as many angles).
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Radius search interval as `lo:hi`.
    #[arg(long, global = true, default_value = "0.00390625:256")]
    radius_bracket: String,

    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write CSV to this path (`-` for standard output).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,

    /// Write JSON to this path (`-` for standard output).
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    /// Accepted for reproducible scripts; every command is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Report potential-theory values in nats instead of bits.
    #[arg(long, global = true)]
    nats: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a file against its schema and the degeneration conditions.
    Validate { input: PathBuf },
    /// Compute an error exponent or bound.
    Exponent {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Symmetric)]
        method: Method,
        /// Circle radius for the fourier, measure and capacity methods.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Fourier modes for the fourier method.
        #[arg(long, default_value_t = 64)]
        modes: usize,
    },
    /// Finite-n interpolation protocol table.
    FiniteN {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64")]
        ns: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Strategy::Optimize)]
        strategy: Strategy,
        /// Radius for the roots strategy.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Rate/exponent trade-off curve and time-sharing baseline.
    Tradeoff { input: PathBuf },
    /// Weighted Fekete configurations on a compact domain.
    Fekete {
        /// Degeneration supplying the weights for `--weights norm`.
        input: Option<PathBuf>,
        #[arg(long, default_value = "annulus:0.5:2")]
        domain: String,
        #[arg(long, value_enum, default_value_t = Weights::Trivial)]
        weights: Weights,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        ns: Vec<usize>,
    },
    /// Edge connectivity and GHZ extraction exponent of a hypergraph.
    Hypergraph { input: PathBuf },
    /// Exponent of a combinatorial degeneration.
    Combinatorial { input: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    Symmetric,
    NormMin,
    CircleAverage,
    Fourier,
    Measure,
    Capacity,
    Combinatorial,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Strategy {
    Roots,
    Optimize,
    Exchange,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Weights {
    Trivial,
    Norm,
}

fn job(args: Args) -> Result<JobSpec, CliError> {
    let options = Options {
        tol: args.tol,
        bracket: parse_bracket(&args.radius_bracket)?,
        nats: args.nats,
        csv: args.csv,
        json: args.json,
    };
    let command = match args.command {
        Cmd::Validate { input } => Command::Validate { input },
        Cmd::Exponent { input, method, radius, modes } => {
            let method = match method {
                Method::Symmetric => MethodArg::Symmetric,
                Method::NormMin => MethodArg::NormMin,
                Method::CircleAverage => MethodArg::CircleAverage,
                Method::Fourier => MethodArg::Fourier,
                Method::Measure => MethodArg::Measure,
                Method::Capacity => MethodArg::Capacity,
                Method::Combinatorial => MethodArg::Combinatorial,
            };
            Command::Exponent { input, method, radius, modes }
        }
        Cmd::FiniteN { input, ns, strategy, radius } => {
            let strategy = match strategy {
                Strategy::Roots => StrategyArg::Roots,
                Strategy::Optimize => StrategyArg::Optimize,
                Strategy::Exchange => StrategyArg::Exchange,
            };
            Command::FiniteN { input, ns, strategy, radius }
        }
        Cmd::Tradeoff { input } => Command::Tradeoff { input, grid: args.grid.unwrap_or(50) },
        Cmd::Fekete { input, domain, weights, ns } => {
            let grid = match args.grid {
                Some(radii) => GridResolution { radii, angles: 2 * radii },
                None => GridResolution::default(),
            };
            let weights = match weights {
                Weights::Trivial => WeightsArg::Trivial,
                Weights::Norm => WeightsArg::Norm,
            };
            Command::Fekete { input, domain: parse_domain(&domain)?, weights, ns, grid }
        }
        Cmd::Hypergraph { input } => Command::Hypergraph { input },
        Cmd::Combinatorial { input } => Command::Combinatorial { input },
    };
    Ok(JobSpec { command, options })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DEGENEX_LOG", "warn")).init();
    let args = Args::parse();
    if let Some(threads) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    if let Some(seed) = args.seed {
        log::debug!("seed {seed} ignored: no command draws random numbers");
    }
    let result = job(args).and_then(|job| run(&job, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
