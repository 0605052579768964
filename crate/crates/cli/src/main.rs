//! `amos`: spectral clustering with automated model-order selection.

mod commands;
mod error;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use amos_core::NormalizeMode;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "amos", version, about = "Spectral graph clustering with automated model-order selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster every connected component of an edge list and print the
    /// selection reports as a JSON array.
    Cluster(ClusterArgs),
    /// Sample a graph from a random interconnection model spec.
    Generate(GenerateArgs),
    /// Phase-transition sweep over interconnection probabilities (or rates).
    Sweep(SweepArgs),
    /// Clustering quality metrics as JSON.
    Metrics(MetricsArgs),
    /// Smallest nontrivial Laplacian eigenvalues of a connected graph.
    Eigen(EigenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Normalize {
    None,
    Degree,
}

impl From<Normalize> for NormalizeMode {
    fn from(n: Normalize) -> Self {
        match n {
            Normalize::None => NormalizeMode::None,
            Normalize::Degree => NormalizeMode::Degree,
        }
    }
}

#[derive(Debug, Args)]
struct ClusterArgs {
    /// Edge list: one `u v` or `u v w` per line.
    #[arg(long)]
    input: PathBuf,
    /// Per-pair V-test significance level.
    #[arg(long, default_value_t = 1e-5)]
    eta: f64,
    /// GLRT homogeneity significance level.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Significance level of the inhomogeneous phase test.
    #[arg(long, default_value_t = 0.05)]
    alpha_prime: f64,
    /// Largest model order tried per component [default: ceil(n/4)].
    #[arg(long)]
    kmax: Option<usize>,
    /// Reweighting applied before clustering.
    #[arg(long, value_enum, default_value_t = Normalize::Degree)]
    normalize: Normalize,
    /// Seed for every random choice; equal seeds give identical output.
    #[arg(long)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// JSON model spec.
    #[arg(long)]
    spec: PathBuf,
    /// Seed for every random choice; equal seeds give identical output.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_edges: PathBuf,
    /// Ground-truth labels, one per line in node order.
    #[arg(long)]
    out_labels: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON model spec; its interconnection entry is replaced by each grid value.
    #[arg(long)]
    spec: PathBuf,
    /// Inclusive grid `start:stop:step`. Values are probabilities, or rates
    /// `p * w_bar` when the spec has exponential weights.
    #[arg(long)]
    grid: String,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Seed for every random choice; equal seeds give identical output.
    #[arg(long)]
    seed: u64,
    /// Worker threads [default: all cores]. Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// CSV output.
    #[arg(long)]
    output: PathBuf,
    /// Also run model-order selection on every cell.
    #[arg(long)]
    with_amos: bool,
    /// Write an SVG line chart of the per-grid-point means.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Found labels, one per line in node order.
    #[arg(long)]
    found: PathBuf,
    /// Ground-truth labels; without them only conductance and normalized cut
    /// are reported.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EigenArgs {
    #[arg(long)]
    input: PathBuf,
    /// Report `lambda_2..lambda_K` and `lambda_{K+1}`.
    #[arg(long)]
    k: usize,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Cluster(a) => commands::cluster(&commands::ClusterConfig {
            input: a.input,
            eta: a.eta,
            alpha: a.alpha,
            alpha_prime: a.alpha_prime,
            kmax: a.kmax,
            normalize: a.normalize.into(),
            seed: a.seed,
            output: a.output,
        }),
        Command::Generate(a) => commands::generate(&a.spec, a.seed, &a.out_edges, &a.out_labels),
        Command::Sweep(a) => commands::sweep(&commands::SweepCommand {
            spec: a.spec,
            grid: a.grid,
            trials: a.trials,
            seed: a.seed,
            threads: a.threads,
            output: a.output,
            with_amos: a.with_amos,
            svg: a.svg,
        }),
        Command::Metrics(a) => commands::metrics(&a.input, &a.found, a.truth.as_deref()),
        Command::Eigen(a) => commands::eigen(&a.input, a.k),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
