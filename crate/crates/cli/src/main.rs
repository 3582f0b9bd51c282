//! `stocore`: instance generation, expected widths, coreset construction
//! and evaluation reports for uncertain point sets.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::io::CliError;

#[derive(Parser, Debug)]
#[command(name = "stocore", version, about = "Expected widths and coresets for uncertain point sets")]
pub struct Cli {
    /// Worker threads for sweeps and reports (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance file from a preset.
    Gen(GenArgs),
    /// Expected width (and optionally its CDF) along one direction.
    Width(WidthArgs),
    /// Expected width and supports over evenly spaced angles (d = 2).
    Sweep(SweepArgs),
    /// Vertices of the expectation polytope M (d = 2).
    Polytope(PolytopeArgs),
    /// Build an ε-exp-kernel.
    Expkernel(ExpkernelArgs),
    /// Build an (ε,τ)-quant-kernel.
    Quantkernel(QuantkernelArgs),
    /// Build an (ε,r)-fpow-kernel.
    Fpowkernel(FpowkernelArgs),
    /// Evaluate a stored kernel against its input.
    Eval(EvalArgs),
    /// Fit an expected minimum enclosing ball or spherical shell.
    Fit(FitArgs),
}

#[derive(Args, Debug)]
pub struct Output {
    /// Output path (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// uniform-disk | circle | clustered | negative-lemma | locational-grid
    pub preset: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Probability of every point (total location mass for locational-grid).
    #[arg(long)]
    pub p: Option<f64>,
    /// Draw each probability uniformly from [beta, 1].
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct WidthArgs {
    /// Instance JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Direction, comma separated (normalized before use).
    #[arg(long, allow_hyphen_values = true)]
    pub dir: String,
    /// Also print Pr[ω ≤ t] for these comma-separated t values.
    #[arg(long, allow_hyphen_values = true)]
    pub cdf: Option<String>,
    /// Use full enumeration instead of the exact sort-based engine.
    #[arg(long)]
    pub enumerate: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Number of angles in [0, 2π).
    #[arg(long, default_value_t = 360)]
    pub k: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct PolytopeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Write an evaluation CSV here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Number of report directions.
    #[arg(long, default_value_t = 64)]
    pub directions: usize,
}

#[derive(Args, Debug)]
pub struct ExpkernelArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub eps: f64,
    /// Build the subset kernel (input points with their own probabilities).
    #[arg(long)]
    pub subset: bool,
    /// β of the subset kernel (default: smallest input probability).
    #[arg(long)]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub report: ReportArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Simple,
    Poisson,
    Tukey,
    TukeyFast,
    Subset,
    Auto,
}

#[derive(Args, Debug)]
pub struct BandArgs {
    /// Number of t values per direction in the band report.
    #[arg(long, default_value_t = 20)]
    pub ts: usize,
    /// Reference CDF engine.
    #[arg(long, value_enum, default_value_t = Against::Exact)]
    pub against: Against,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Against {
    /// Sort-based exact CDF.
    Exact,
    /// Full enumeration (at most 24 realization bits).
    Enumerate,
}

#[derive(Args, Debug)]
pub struct QuantkernelArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub tau: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// β of the subset method (default: smallest input probability).
    #[arg(long)]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub report: ReportArgs,
    #[command(flatten)]
    pub band: BandArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct FpowkernelArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub report: ReportArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Kernel JSON written by expkernel, quantkernel or fpowkernel.
    #[arg(long)]
    pub kernel: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub directions: usize,
    #[command(flatten)]
    pub band: BandArgs,
    /// Report CSV path (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Meb,
    Shell,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[arg(value_enum)]
    pub shape: ShapeArg,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = cli.threads.unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::io(format!("thread pool: {e}")))?;
    match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Width(a) => commands::width(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Polytope(a) => commands::polytope(a),
        Command::Expkernel(a) => commands::expkernel(a),
        Command::Quantkernel(a) => commands::quantkernel(a),
        Command::Fpowkernel(a) => commands::fpowkernel(a),
        Command::Eval(a) => commands::eval(a),
        Command::Fit(a) => commands::fit(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code, e.message);
            ExitCode::from(e.exit)
        }
    }
}
