use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fmoment::synth::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "fmoment", version, about = "Factorial moments, intermittency and gap statistics of event sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Like-sign and unlike-sign factorial moments per bin count.
    Moments(MomentsArgs),
    /// Scan F_q over bin counts and fit the power-law scaling.
    Scan(ScanArgs),
    /// Gap (run-length) distributions and exponential fits.
    Gaps(GapsArgs),
    /// Fixed-coupling multifractal dimensions D_q.
    Predict(PredictArgs),
    /// Write a synthetic series as CSV.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Price CSV with `timestamp,price` rows.
    #[arg(long, required_unless_present = "synth", conflicts_with = "synth")]
    pub input: Option<PathBuf>,
    /// Synthetic generator, e.g. `iid:n=100001` or `markov:p=0.7,n=100000`.
    #[arg(long)]
    pub synth: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// CSV field delimiter.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write two-column plot files into this directory.
    #[arg(long, value_name = "DIR")]
    pub emit_points: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignMode {
    Pos,
    Neg,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Pos,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Wls,
    Mle,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Ticks per window (defaults to the cascade length for cascade input).
    #[arg(long)]
    pub window: Option<usize>,
    /// Bin counts, each dividing the window.
    #[arg(long, value_delimiter = ',', required = true)]
    pub bins: Vec<usize>,
    /// Highest moment order.
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    #[arg(long, value_enum, default_value_t = SignMode::Both)]
    pub sign: SignMode,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub window: Option<usize>,
    /// Strictly increasing bin counts, at least two.
    #[arg(long, value_delimiter = ',', required = true)]
    pub bins: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// Phase-space dimension.
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    #[arg(long, value_enum, default_value_t = SignArg::Pos)]
    pub sign: SignArg,
    /// Bootstrap resamples per level (0 disables).
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GapsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = SignMode::Both)]
    pub sign: SignMode,
    #[arg(long, value_enum, default_value_t = MethodArg::Wls)]
    pub method: MethodArg,
    /// Resampling factors; later factors are compared against the first.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub resample: Vec<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_s: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 3.0)]
    pub c_a: f64,
    /// Moment orders.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
    pub q: Vec<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator, e.g. `cascade:levels=10,w=0.7`.
    #[arg(long)]
    pub synth: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl SignArg {
    pub fn sign(self) -> fmoment::Sign {
        match self {
            SignArg::Pos => fmoment::Sign::Pos,
            SignArg::Neg => fmoment::Sign::Neg,
        }
    }
}

impl SignMode {
    pub fn signs(self) -> Vec<fmoment::Sign> {
        match self {
            SignMode::Pos => vec![fmoment::Sign::Pos],
            SignMode::Neg => vec![fmoment::Sign::Neg],
            SignMode::Both => vec![fmoment::Sign::Pos, fmoment::Sign::Neg],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SignMode::Pos => "pos",
            SignMode::Neg => "neg",
            SignMode::Both => "both",
        }
    }
}

impl MethodArg {
    pub fn method(self) -> fmoment::FitMethod {
        match self {
            MethodArg::Wls => fmoment::FitMethod::LogLinearWls,
            MethodArg::Mle => fmoment::FitMethod::GeometricMle,
        }
    }
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}
