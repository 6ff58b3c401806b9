//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "lmsf",
    version,
    about = "Sparse FIR channel estimation: mixed square/fourth adaptive filters, \
             steady-state theory tables, and reproducible Monte-Carlo experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the paired algorithm comparison; writes one learning-curve CSV
    /// per algorithm plus a JSON summary with theory overlays.
    Compare(CompareArgs),
    /// Sweep a sparse-penalty parameter and report the best grid point.
    Sweep(SweepArgs),
    /// Tabulate closed-form steady-state predictions over a parameter grid.
    Theory(TheoryArgs),
    /// Draw one sparse channel realization and dump it as CSV stem data.
    Channel(ChannelArgs),
    /// Re-run a previous command from its manifest; reproduces every data
    /// file byte for byte.
    Rerun(RerunArgs),
}

/// Parameters shared by all experiment commands. Every value resolves as
/// flag > `LMSF_*` environment variable > config file > built-in default.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML config file; flags and env vars override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Channel length N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of nonzero channel taps K.
    #[arg(long)]
    pub k: Option<usize>,
    /// Average SNR in dB (noise variance = power * 10^(-snr/10)).
    #[arg(long = "snr-db")]
    pub snr_db: Option<f64>,
    /// Initial step-size of the LMS/F family.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Fixed step-size of the LMS family.
    #[arg(long = "mu-s")]
    pub mu_s: Option<f64>,
    /// Fixed step-size of the LMF baseline.
    #[arg(long = "mu-lmf")]
    pub mu_lmf: Option<f64>,
    /// Threshold parameter of the LMS/F family.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// ZA-LMS/F regularization weight.
    #[arg(long = "rho-za")]
    pub rho_za: Option<f64>,
    /// RZA-LMS/F regularization weight.
    #[arg(long = "rho-rza")]
    pub rho_rza: Option<f64>,
    /// ZA-LMS regularization weight.
    #[arg(long = "rho-zas")]
    pub rho_zas: Option<f64>,
    /// RZA-LMS regularization weight.
    #[arg(long = "rho-rzas")]
    pub rho_rzas: Option<f64>,
    /// Reweight factor of the RZA rules.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Number of Monte-Carlo runs.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Iterations per run.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Master seed; trial streams derive from it deterministically.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Training signal family.
    #[arg(long, value_enum)]
    pub signal: Option<SignalArg>,
    /// Rescale every channel realization to unit norm.
    #[arg(long = "normalize-channel", action = clap::ArgAction::SetTrue)]
    pub normalize_channel: bool,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker thread cap (does not affect results).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Fraction of final iterations averaged into the steady-state readout.
    #[arg(long = "tail-fraction")]
    pub tail_fraction: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Which parameter to sweep.
    #[arg(long, value_enum)]
    pub target: SweepTargetArg,
    /// Explicit comma-separated grid values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub grid: Option<Vec<f64>>,
    /// Log-spaced grid START:STOP:COUNT.
    #[arg(long = "grid-log")]
    pub grid_log: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Which parameter the table varies.
    #[arg(long, value_enum, default_value = "lambda")]
    pub param: TheoryParamArg,
    /// Explicit comma-separated grid values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub grid: Option<Vec<f64>>,
    /// Log-spaced grid START:STOP:COUNT.
    #[arg(long = "grid-log")]
    pub grid_log: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ChannelArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Named channel preset overriding N and K.
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
}

#[derive(Debug, Clone, Args)]
pub struct RerunArgs {
    /// Manifest written by a previous run.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory (defaults to the manifest's directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker thread cap (does not affect results).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignalArg {
    /// Maximal-length PN sequence mapped to ±√power.
    Pn,
    /// I.i.d. Gaussian samples.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTargetArg {
    RhoZa,
    RhoRza,
    Epsilon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoryParamArg {
    Lambda,
    Mu,
    MuS,
    GammaZa,
    SnrDb,
    K,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    /// Six dominant taps on a length-30 grid.
    VehicularB,
}
