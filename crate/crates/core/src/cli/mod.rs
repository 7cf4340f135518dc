//! Command-line front end: `convert`, `inspect`, `reorder`, `solve`,
//! `bench`, `model` and `dse`.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code, so the binary and the tests share a single entry point.

mod bench;
mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::perfmodel::PerfConfig;
use crate::precond::PrecondKind;
use crate::solver::ReorderKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_SOLVE: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;
pub const EXIT_MODEL: i32 = 6;

/// Caps the worker threads used by `bench` and `dse`.
pub const THREADS_ENV: &str = "SOLVER_KIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "solver-kit", version, about = "Sparse formats, ILU0-BiCGStab and an accelerator cycle model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a Matrix Market or CSRO file to CSRO or canonical text
    Convert(ConvertArgs),
    /// Print structural statistics as JSON
    Inspect(InspectArgs),
    /// Compute a reordering and report its colors
    Reorder(ReorderArgs),
    /// Solve A x = b with BiCGStab and print the result as JSON
    Solve(SolveArgs),
    /// Time every preconditioner at each reduction over a list of matrices
    Bench(BenchArgs),
    /// Estimate accelerator cycles for a solve
    Model(ModelArgs),
    /// Sweep the accelerator model over a parameter grid
    Dse(DseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertTarget {
    Csro,
    CsrText,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    /// Destination file, `-` for standard output
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = ConvertTarget::Csro)]
    pub to: ConvertTarget,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReorderArg {
    None,
    Level,
    Color,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecondArg {
    None,
    Jacobi,
    Ilu0,
}

impl From<PrecondArg> for PrecondKind {
    fn from(p: PrecondArg) -> Self {
        match p {
            PrecondArg::None => Self::None,
            PrecondArg::Jacobi => Self::Jacobi,
            PrecondArg::Ilu0 => Self::Ilu0,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReorderFlags {
    #[arg(long, value_enum, default_value_t = ReorderArg::None)]
    pub reorder: ReorderArg,
    /// Seed for graph coloring
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest color graph coloring may produce
    #[arg(long)]
    pub max_rows_per_color: Option<usize>,
}

impl ReorderFlags {
    pub fn kind(&self) -> ReorderKind {
        match self.reorder {
            ReorderArg::None => ReorderKind::None,
            ReorderArg::Level => ReorderKind::LevelScheduling,
            ReorderArg::Color => {
                ReorderKind::GraphColoring { seed: self.seed, max_rows_per_color: self.max_rows_per_color }
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct ReorderArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ReorderArg::Level)]
    pub method: ReorderArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_rows_per_color: Option<usize>,
    /// Include the full permutation in the output
    #[arg(long)]
    pub with_permutation: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = PrecondArg::None)]
    pub precond: PrecondArg,
    #[command(flatten)]
    pub reorder: ReorderFlags,
    /// Stop once the residual norm falls below this fraction of the initial one
    #[arg(long, default_value_t = 1e-2, value_parser = parse_reduction)]
    pub reduction: f64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iter: u64,
    /// `ones`, `a-ones` (b = A·1) or a file of whitespace-separated values
    #[arg(long, default_value = "a-ones")]
    pub rhs: String,
    /// Write the JSON result here instead of standard output
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Write the solution vector here, one value per line
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// Add the modeled accelerator time next to the measured time
    #[arg(long)]
    pub model: bool,
    #[command(flatten)]
    pub point: PerfPoint,
    #[command(flatten)]
    pub knobs: PerfKnobs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchFormat {
    Csv,
    Markdown,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// File listing one matrix path per line; `#` starts a comment
    pub list: PathBuf,
    #[arg(long, value_enum, default_value_t = BenchFormat::Markdown)]
    pub format: BenchFormat,
    #[command(flatten)]
    pub reorder: ReorderFlags,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-6], value_parser = parse_reduction)]
    pub reductions: Vec<f64>,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iter: u64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Hardware knobs shared by `solve --model`, `model` and `dse`.
#[derive(Debug, Clone, Args)]
pub struct PerfKnobs {
    #[arg(long, default_value_t = 8, value_parser = parse_width)]
    pub width: u32,
    #[arg(long, default_value_t = 280.0)]
    pub clock_mhz: f64,
    #[arg(long, default_value_t = 8)]
    pub fp_add_latency: u32,
    #[arg(long, default_value_t = 8)]
    pub fp_mul_latency: u32,
    #[arg(long, default_value_t = 64)]
    pub setup_cycles: u32,
    #[arg(long, default_value_t = 16)]
    pub write_overhead: u32,
    #[arg(long, default_value_t = 32)]
    pub ilu0_delay: u32,
}

#[derive(Debug, Clone, Args)]
pub struct PerfPoint {
    #[arg(long, default_value_t = 8)]
    pub mults: u32,
    /// External bandwidth in GB/s
    #[arg(long, default_value_t = 50.0)]
    pub bandwidth: f64,
    #[arg(long, default_value_t = 2)]
    pub ports: u32,
}

impl PerfKnobs {
    pub fn config(&self, point: &PerfPoint) -> PerfConfig {
        PerfConfig {
            n_multipliers: point.mults,
            ext_bandwidth_gbps: point.bandwidth,
            n_internal_ports: point.ports,
            fp_add_latency_cycles: self.fp_add_latency,
            fp_mul_latency_cycles: self.fp_mul_latency,
            clock_mhz: self.clock_mhz,
            value_width_bytes: self.width,
            setup_cycles: self.setup_cycles,
            write_overhead_cycles: self.write_overhead,
            ilu0_unit_delay_cycles: self.ilu0_delay,
        }
    }
}

/// Either a matrix file or a synthetic description of one.
#[derive(Debug, Clone, Args)]
pub struct ModelSource {
    #[arg(required_unless_present = "synthetic", conflicts_with = "synthetic")]
    pub input: Option<PathBuf>,
    /// `N,NNZ,L_NNZ,U_NNZ,COLORS` with evenly spread colors
    #[arg(long, value_parser = parse_synthetic)]
    pub synthetic: Option<[usize; 5]>,
    /// Reordering applied before partitioning a matrix file
    #[arg(long, value_enum, default_value_t = ReorderArg::Level)]
    pub reorder: ReorderArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_rows_per_color: Option<usize>,
    /// BiCGStab iterations to cost, a multiple of 0.5
    #[arg(long, default_value_t = 1.0)]
    pub iters: f64,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub source: ModelSource,
    #[command(flatten)]
    pub point: PerfPoint,
    #[command(flatten)]
    pub knobs: PerfKnobs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DseFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct DseArgs {
    #[command(flatten)]
    pub source: ModelSource,
    #[arg(long, value_delimiter = ',', default_values_t = [8])]
    pub mults: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = [50.0])]
    pub bandwidth: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [2])]
    pub ports: Vec<u32>,
    #[command(flatten)]
    pub knobs: PerfKnobs,
    #[arg(long, value_enum, default_value_t = DseFormat::Csv)]
    pub format: DseFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn parse_reduction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("reduction must lie in (0, 1), got {v}"))
    }
}

fn parse_width(s: &str) -> Result<u32, String> {
    match s {
        "4" => Ok(4),
        "8" => Ok(8),
        _ => Err(format!("value width must be 4 or 8 bytes, got {s}")),
    }
}

fn parse_synthetic(s: &str) -> Result<[usize; 5], String> {
    let parts: Vec<usize> =
        s.split(',').map(|p| p.trim().parse::<usize>().map_err(|e| format!("'{p}': {e}"))).collect::<Result<_, _>>()?;
    parts.try_into().map_err(|p: Vec<usize>| format!("expected 5 comma-separated counts, got {}", p.len()))
}

/// A failure carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::Csro(_) | Error::Io(_) => EXIT_INPUT,
            Error::Matrix(_) | Error::Reorder(_) | Error::Precond(_) | Error::Solver(_) => EXIT_SOLVE,
            Error::Model(_) => EXIT_MODEL,
            Error::Invalid(_) => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

macro_rules! impl_from_via_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}
impl_from_via_error!(
    crate::error::MatrixError,
    crate::error::ParseError,
    crate::error::CsroIoError,
    crate::error::ReorderError,
    crate::error::PrecondError,
    crate::error::SolverError,
    crate::error::ModelError,
    std::io::Error
);

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match commands::dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

/// Builds the worker pool honouring [`THREADS_ENV`].
pub(crate) fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError { code: EXIT_USAGE, message: e.to_string() })
}
