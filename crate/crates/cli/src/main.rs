use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twisted_paraproduct_cli::commands;
use twisted_paraproduct_cli::config::{load_config_file, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "tpp",
    version,
    about = "Twisted-paraproduct laboratory: identity suites, exponent sweeps, and reports",
    after_help = "Exit codes: 0 success, 1 property failure, 2 usage error.\n\
        Sweep CSV columns: p,q,ratio,trend — `ratio` is the largest observed\n\
        norm ratio, `trend` the per-step log slope for interior pairs and the\n\
        per-doubling growth factor for endpoint pairs."
)]
struct Cli {
    /// Optional key=value config file (keys: N, seed, trials, steps, grid, out, format)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Resolution exponent: grids have 2^N cells per side (lattice log-size
    /// for `continuous`)
    #[arg(long = "N", global = true)]
    n: Option<usize>,

    /// Seed for every random draw; identical seeds give byte-identical output
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Random trials per identity or sweep point
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Sweep grid: default | coarse
    #[arg(long, global = true)]
    grid: Option<String>,

    /// Output directory for generated files
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Formats written by `sweep` (comma separated)
    #[arg(long, global = true, value_delimiter = ',')]
    format: Option<Vec<OutputFormat>>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every exact-identity residual suite; nonzero exit on any failure
    Identities,
    /// Empirical norm-ratio sweep over exponent pairs with CSV/JSON/SVG output
    Sweep {
        /// Greedy ascent steps per sweep point
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Endpoint counterexample growth tables
    Counterexamples {
        /// Output-norm exponent of the growth table
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        /// Largest counterexample index
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// Stopping-time decomposition report with per-level CSV
    Decompose {
        #[arg(long, default_value_t = 3.0)]
        p: f64,
        #[arg(long, default_value_t = 3.0)]
        q: f64,
        #[arg(long, default_value_t = 3.0)]
        r: f64,
    },
    /// Fiber-wise Calderon-Zygmund splitting and weak-endpoint measures
    Cz {
        /// Decomposition threshold
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Periodic Fourier model: support identities, comb decomposition, JSW ratios
    Continuous {
        /// Random band-limited pairs for the decomposition residual
        #[arg(long, default_value_t = 5)]
        pairs: usize,
    },
    /// Three-dimensional forms: telescoping, box L4 domination, reduction arrows
    Dim3,
}

fn effective_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut config = RunConfig::default();
    if let Some(path) = &cli.config {
        config = load_config_file(path, config)?;
    }
    if let Some(n) = cli.n {
        config.n = n;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(trials) = cli.trials {
        config.trials = trials;
    }
    if let Some(grid) = &cli.grid {
        config.grid = grid.clone();
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    if let Some(format) = &cli.format {
        config.format = format.clone();
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match effective_config(&cli) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("{message}");
            return ExitCode::from(2);
        }
    };
    let ok = match cli.command {
        Command::Identities => commands::cmd_identities(&config),
        Command::Sweep { steps } => commands::cmd_sweep(&config, steps),
        Command::Counterexamples { q, nmax } => commands::cmd_counterexamples(q, nmax),
        Command::Decompose { p, q, r } => commands::cmd_decompose(&config, p, q, r),
        Command::Cz { lambda } => commands::cmd_cz(&config, lambda),
        Command::Continuous { pairs } => commands::cmd_continuous(&config, pairs),
        Command::Dim3 => commands::cmd_dim3(&config),
    };
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
