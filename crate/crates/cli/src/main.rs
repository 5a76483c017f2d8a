mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Failure;

#[derive(Parser, Debug)]
#[command(name = "hyperfrac", version, about = "Higher-order fractional Laplacians and their checks")]
struct Cli {
    /// Worker threads for grid evaluations (default: available parallelism).
    /// HYPERFRAC_THREADS takes precedence when set.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// `N`, `m`, `s` as the operator takes them.
#[derive(Args, Debug, Clone)]
pub struct OrderArgs {
    #[arg(long = "N", default_value_t = 1)]
    pub dim: u32,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub s: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalizing constant c_{N,m,s} and its endpoint limits.
    Constant(OrderArgs),
    /// Integer weights of the centred difference of order 2m.
    Stencil {
        #[arg(long)]
        m: u32,
    },
    /// Evaluate L_{m,s} f on a grid or a list of points.
    Apply(commands::ApplyArgs),
    /// Compare the direct operator with the FFT multiplier.
    SymbolCheck(commands::SymbolArgs),
    /// Compare L_{m,s} f with the composition (-Delta)^sigma (-Delta)^n f.
    EquivCheck(commands::EquivArgs),
    /// Behaviour of the operator and its constant as s -> 0 and s -> m.
    LimitsCheck(commands::LimitsArgs),
    /// Direct energy form against the Fourier-side energy.
    Bilinear(commands::BilinearArgs),
    /// Residual of the explicit s-harmonic function in the unit ball.
    Harmonic(commands::HarmonicArgs),
    /// Run the exact rational identity suite.
    Identities,
}

fn init_threads(flag: Option<usize>) -> Result<(), Failure> {
    let threads = match std::env::var("HYPERFRAC_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Failure::config(format!("HYPERFRAC_THREADS must be a positive integer, got '{v}'")))?,
        ),
        Err(_) => flag,
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::config("thread count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::config(format!("could not size the worker pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<output::Report, Failure> {
    init_threads(cli.threads)?;
    match cli.command {
        Command::Constant(a) => commands::constant(&a),
        Command::Stencil { m } => commands::stencil(m),
        Command::Apply(a) => commands::apply(&a),
        Command::SymbolCheck(a) => commands::symbol_check(&a),
        Command::EquivCheck(a) => commands::equiv_check(&a),
        Command::LimitsCheck(a) => commands::limits_check(&a),
        Command::Bilinear(a) => commands::bilinear(&a),
        Command::Harmonic(a) => commands::harmonic(&a),
        Command::Identities => commands::identities(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return output::fail(&Failure::config(e.to_string().trim_end())),
    };
    let out = cli.out.clone();
    match run(cli) {
        Ok(report) => output::emit(&report, out.as_deref()),
        Err(f) => output::fail(&f),
    }
}
