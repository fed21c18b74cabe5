//! `detmart`: kernel tables, correlation queries, weighted sampling and
//! scaling studies for noncolliding walks.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use detmart::finite_kernel::Mode;
use detmart::infinite::{KernelRoute, DEFAULT_NODES};
use detmart::lattice_walk::DEFAULT_ENUMERATION_CAP;

mod commands;
mod grid;

#[derive(Parser, Debug)]
#[command(name = "detmart", version, about = "Determinantal kernels of noncolliding random walks")]
struct Cli {
    /// Worker threads for grid evaluation and sampling.
    #[arg(long, global = true, env = "DETMART_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate a kernel on a space-time grid as CSV `s,x,t,y,value,mode`.
    Kernel(KernelArgs),
    /// Correlation function or Fredholm determinant as JSON.
    Correlate(CorrelateArgs),
    /// Weighted free-walk ensemble as JSON lines, plus a JSON summary.
    Sample(SampleArgs),
    /// Gap sweeps over a grid of scales `n` as CSV.
    Study(StudyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Direct,
    Spectral,
    Auto,
}

impl From<RouteArg> for KernelRoute {
    fn from(r: RouteArg) -> KernelRoute {
        match r {
            RouteArg::Direct => KernelRoute::Direct,
            RouteArg::Spectral => KernelRoute::Spectral,
            RouteArg::Auto => KernelRoute::Auto,
        }
    }
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    /// Finite starting configuration, e.g. `0,2,4`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "equidistant")]
    pub sites: Option<String>,
    /// Equidistant infinite configuration `2aZ`, given as `a=2` or `2`.
    #[arg(long)]
    pub equidistant: Option<String>,
    /// Translation-invariant sine kernel of density `ρ`; defaults to `1/2a`.
    #[arg(long)]
    pub sine: bool,
    /// Density for `--sine` when no `--equidistant` is given.
    #[arg(long, requires = "sine")]
    pub rho: Option<f64>,
    /// Diffusive-limit kernels with real times and positions.
    #[arg(long)]
    pub continuum: bool,
    /// Grid `s=..,x=..,t=..,y=..`; each axis is `v`, `a..b` or `a..b:step`.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub grid: String,
    /// Time differences for `--sine`.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub dt: String,
    /// Position differences for `--sine`.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub dx: String,
    /// Arithmetic; exact is available for finite lattice configurations and is their default.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Quadrature nodes for the infinite-system integrals.
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long, value_enum, default_value = "auto")]
    pub route: RouteArg,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CorrelateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub sites: String,
    /// Space-time point `t,x`; repeat for several points.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub points: Vec<String>,
    /// Evaluate `det(I + Kχ)` instead of a correlation function.
    #[arg(long)]
    pub fredholm: bool,
    /// Test function entry `t,x,value` for `--fredholm`; value may be `num/den`.
    #[arg(long = "chi", allow_hyphen_values = true, requires = "fredholm")]
    pub chi: Vec<String>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    /// Also compute the value by exhaustive path enumeration.
    #[arg(long)]
    pub oracle: bool,
    /// Enumeration horizon; defaults to the latest time queried.
    #[arg(long)]
    pub horizon: Option<u32>,
    /// Maximum total number of enumerated increments `N T`.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u32,
    /// Agreement tolerance between float values and the oracle.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub sites: String,
    #[arg(long)]
    pub horizon: u32,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent random streams; output depends on this, not on threads.
    #[arg(long, default_value_t = 1)]
    pub streams: u32,
    /// Space-time point `t,x` whose correlation is estimated; repeatable.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub points: Vec<String>,
    /// Exact values by enumeration alongside the estimates.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u32,
    /// JSON-lines file receiving every sampled bundle and weight.
    #[arg(long)]
    pub ensemble: Option<PathBuf>,
    /// Summary JSON destination.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StudyKind {
    /// `|K(s+n, x; t+n, y) - K_ρ(t-s, y-x)|` for `2aZ`.
    Relaxation,
    /// Distances to the Brownian limit at scale `n`.
    Convergence,
}

#[derive(Args, Debug)]
pub struct StudyArgs {
    #[arg(value_enum)]
    pub kind: StudyKind,
    /// Equidistant parameter for relaxation.
    #[arg(long, default_value = "2")]
    pub a: String,
    /// Starting configuration for convergence.
    #[arg(long, allow_hyphen_values = true, default_value = "0,2")]
    pub sites: String,
    /// Scales, comma separated.
    #[arg(long, conflicts_with = "geometric")]
    pub n: Option<String>,
    /// Geometric scales `start:ratio:count`.
    #[arg(long)]
    pub geometric: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub s: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub x: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub y: f64,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Lib(detmart::Error),
    Config(String),
    Io(io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(detmart::Error::CapExceeded { .. }) => 3,
            CliError::Lib(_) | CliError::Config(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<detmart::Error> for CliError {
    fn from(e: detmart::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

pub fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Kernel(a) => commands::kernel(&a),
        Command::Correlate(a) => commands::correlate(&a),
        Command::Sample(a) => commands::sample(&a),
        Command::Study(a) => commands::study(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("detmart: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
