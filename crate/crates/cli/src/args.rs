use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "treeshift",
    version,
    about = "Experiments on weighted shifts over truncated directed trees",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Column norms ||S^n e_u|| and operator norms ||S^n||.
    Norms(NormsArgs),
    /// Spectral surrogate ||S^n||^(1/n) and path radii.
    Radius(RadiusArgs),
    /// Fejer approximation errors of a multiplier.
    Approx(ApproxArgs),
    /// Circle integral against the Hadamard product, on random data.
    Integral(IntegralArgs),
    /// Wold decomposition round trip over ker S*.
    Wold(WoldArgs),
    /// Balance checks against orthogonality of the Wold factors.
    Balanced(PowerArgs),
    /// Cross Gram blocks <S^n g, S^m h> and image intersections.
    Gram(PowerArgs),
    /// Dump a fixture: vertices, weights and a reloadable tree spec.
    Gallery(SourceArgs),
    /// Peel a vector into its Wold components.
    Peel(WoldArgs),
    /// Print the experiment registry.
    List,
}

/// Where the shift comes from, plus output and tolerance.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["tree", "family"])))]
pub struct SourceArgs {
    /// JSON tree spec (gallery family or explicit vertices/edges).
    #[arg(long, value_name = "FILE")]
    pub tree: Option<PathBuf>,
    /// Gallery family: unilateral, mad, broom, broom_leaf, t2, t2_zero, random, random_balanced.
    #[arg(long, value_name = "NAME")]
    pub family: Option<String>,
    /// Truncation depth (infinite families only).
    #[arg(long, value_name = "D")]
    pub depth: Option<usize>,
    /// Lower-ray weight for t2.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of arms for the brooms.
    #[arg(long)]
    pub arms: Option<usize>,
    /// Seed for random families and random test data.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory (TREESHIFT_OUT takes precedence).
    #[arg(long, value_name = "DIR", default_value = "treeshift-out")]
    pub out: PathBuf,
    /// Tolerance for the experiment's main check.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Largest power (default: the truncation depth).
    #[arg(long)]
    pub max_power: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RadiusArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub max_power: Option<usize>,
    /// Number of root-to-boundary paths to report.
    #[arg(long, default_value_t = 8)]
    pub paths: usize,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Symbol: ones:K, indicator:k, power_law:K[:exp] or JSON.
    #[arg(long, default_value = "ones:8")]
    pub phi: String,
    /// Fejer indices.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub ns: Vec<usize>,
    /// Cap on the number of basis-vector probes.
    #[arg(long, default_value_t = 512)]
    pub max_probes: usize,
}

#[derive(Debug, Args)]
pub struct IntegralArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Symbol (default: a random one per case).
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub cases: usize,
    /// Largest degree of the random trigonometric polynomials.
    #[arg(long, default_value_t = 8)]
    pub degree: usize,
}

#[derive(Debug, Args)]
pub struct WoldArgs {
    #[command(flatten)]
    pub source: SourceArgs,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Largest power considered.
    #[arg(long, default_value_t = 4)]
    pub max_power: usize,
}
