use clap::{Args, Parser, Subcommand, ValueEnum};
use poisson_waves::bounds::Theorem;
use poisson_waves::moments::Target;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Poisson random waves on the sphere: special functions, cumulants,
/// normal-approximation bounds and Monte Carlo experiments.
#[derive(Debug, Parser)]
#[command(name = "poisson-waves", version)]
pub struct Cli {
    /// Worker threads for Monte Carlo work; results do not depend on it.
    #[arg(long, global = true, env = "POISSON_WAVES_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wigner 3j symbol (l1 l2 l3; m1 m2 m3).
    #[command(allow_negative_numbers = true)]
    Wigner3j {
        l1: u32,
        l2: u32,
        l3: u32,
        m1: i32,
        m2: i32,
        m3: i32,
        /// Also print the exact value as rational × √integer.
        #[arg(long)]
        exact: bool,
    },
    /// Clebsch–Gordan coefficient C^{l m}_{l1 m1; l2 m2}.
    #[command(allow_negative_numbers = true)]
    Cg {
        l1: u32,
        m1: i32,
        l2: u32,
        m2: i32,
        l: u32,
        m: i32,
        #[arg(long)]
        exact: bool,
    },
    /// Legendre or associated Legendre function, or the quartic moment.
    Legendre(LegendreArgs),
    /// Exact fourth cumulant of a target, optionally with a Monte Carlo estimate.
    Cumulants(CumulantArgs),
    /// Evaluate one of the normal-approximation bounds.
    Bounds(BoundArgs),
    /// Run one Monte Carlo experiment.
    Simulate(SimulateArgs),
    /// Run a grid of experiments and fit convergence slopes.
    Sweep(SweepArgs),
    /// Run the identity and bound verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct LegendreArgs {
    #[arg(long)]
    pub ell: usize,
    /// Argument in [-1, 1].
    #[arg(long, allow_hyphen_values = true, required_unless_present = "quartic")]
    pub t: Option<f64>,
    /// Order of the associated function (no Condon–Shortley phase).
    #[arg(long)]
    pub m: Option<usize>,
    /// Multiply by the spherical-harmonic normalization.
    #[arg(long)]
    pub normalized: bool,
    /// Print ∫_0^1 P_ℓ(t)^4 dt instead.
    #[arg(long, conflicts_with_all = ["t", "m", "normalized"])]
    pub quartic: bool,
}

#[derive(Debug, Args)]
pub struct CumulantArgs {
    #[arg(long)]
    pub ell: usize,
    #[arg(long)]
    pub rate: f64,
    /// Shorthand for `--target coefficient:M`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "target")]
    pub m: Option<i64>,
    /// point_value, coefficient:M, coefficient_sum, norm_squared or fdd.
    #[arg(long)]
    pub target: Option<Target>,
    /// Number of evaluation points for the fdd target.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Add a Monte Carlo estimate from this many replicates.
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for cumulants.csv and cumulants.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub theorem: Theorem,
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long)]
    pub rate: f64,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub m1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m3: f64,
    /// Directory for bounds.csv and bounds.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON experiment document; replaces the individual flags.
    #[arg(long, conflicts_with_all = ["ell", "rate", "replicates", "seed", "target"])]
    pub config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    pub ell: Option<usize>,
    #[arg(long, required_unless_present = "config")]
    pub rate: Option<f64>,
    #[arg(long, required_unless_present = "config")]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub target: Option<Target>,
    /// Also write every replicate value to samples.csv.
    #[arg(long)]
    pub samples: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Fast)]
    pub level: Level,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write the manifest to this file as well as stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
