use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "prospect", version, about = "Prospect-agent market simulation, calibration and option pricing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one price path.
    Simulate(SimulateArgs),
    /// Estimate drift and variance curves from a price CSV.
    Calibrate(CalibrateArgs),
    /// Monte Carlo price of one European call.
    Price(PriceArgs),
    /// Implied-volatility surface from Monte Carlo prices.
    Ivsurface(SurfaceArgs),
    /// Black-Scholes Vega over a strike x maturity grid.
    Vegamap(VegaArgs),
    /// Spread of Monte Carlo prices across seeded trials.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Drift and volatility derived from the demand curves.
    Derived,
    /// Fitted polynomial drift and volatility.
    Surrogate,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// `equity`, `fx`, or a demand-curve file.
    #[arg(long, default_value = "equity")]
    pub preset: String,
    #[arg(long, value_enum, default_value_t = ModelKind::Derived)]
    pub model: ModelKind,
    /// Trend-chasing weight (default from preset).
    #[arg(long)]
    pub xi: Option<f64>,
    /// Noise weight (default from preset).
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    /// Step length in years.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    /// Number of prices including p0 and p1.
    #[arg(long, default_value_t = 1500)]
    pub n: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Price CSV (`date,price`).
    #[arg(long)]
    pub input: PathBuf,
    /// Use only the most recent S prices.
    #[arg(long = "S")]
    pub window: Option<usize>,
    /// Bandwidth divisor: h = range / gamma.
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 101)]
    pub grid_points: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Market {
    /// Surrogate preset: `equity` or `fx`.
    #[arg(long, default_value = "equity")]
    pub preset: String,
    /// Annual risk-free rate.
    #[arg(long, default_value_t = 0.03, allow_hyphen_values = true)]
    pub rate: f64,
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct Sampling {
    /// Pair each path with its mirror.
    #[arg(long)]
    pub antithetic: bool,
    /// Minimum per-step volatility.
    #[arg(long, default_value_t = 1e-4)]
    pub vol_floor: f64,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[arg(long = "K", default_value_t = 800.0)]
    pub strike: f64,
    #[arg(long = "T-months", default_value_t = 60)]
    pub months: u32,
    /// Number of Monte Carlo paths.
    #[arg(long, default_value_t = 200_000)]
    pub paths: usize,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub market: Market,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Grid {
    #[arg(long = "K-min", default_value_t = 1100.0)]
    pub k_min: f64,
    #[arg(long = "K-max", default_value_t = 2000.0)]
    pub k_max: f64,
    #[arg(long = "K-count", default_value_t = 10)]
    pub k_count: usize,
    #[arg(long = "T-min", default_value_t = 6)]
    pub t_min: u32,
    #[arg(long = "T-max", default_value_t = 60)]
    pub t_max: u32,
    #[arg(long = "T-step", default_value_t = 6)]
    pub t_step: u32,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub grid: Grid,
    /// Minimum Vega for a reported implied volatility.
    #[arg(long, default_value_t = 1e-4)]
    pub guard: f64,
    #[arg(long, default_value_t = 200_000)]
    pub paths: usize,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub market: Market,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VegaArgs {
    #[arg(long, default_value_t = 0.15)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1459.37)]
    pub spot: f64,
    #[arg(long, default_value_t = 0.03, allow_hyphen_values = true)]
    pub rate: f64,
    #[arg(long = "K-min", default_value_t = 800.0)]
    pub k_min: f64,
    #[arg(long = "K-max", default_value_t = 2200.0)]
    pub k_max: f64,
    #[arg(long = "K-count", default_value_t = 141)]
    pub k_count: usize,
    #[arg(long = "T-min", default_value_t = 1)]
    pub t_min: u32,
    #[arg(long = "T-max", default_value_t = 60)]
    pub t_max: u32,
    #[arg(long = "T-step", default_value_t = 1)]
    pub t_step: u32,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long = "K", default_value_t = 800.0)]
    pub strike: f64,
    #[arg(long = "T-months", default_value_t = 60)]
    pub months: u32,
    /// Comma-separated path counts.
    #[arg(long, value_delimiter = ',', default_value = "10000,20000,50000,100000,200000,500000,1000000")]
    pub path_counts: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[command(flatten)]
    pub market: Market,
    #[command(flatten)]
    pub common: Common,
}
