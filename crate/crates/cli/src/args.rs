use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Finite-truncation laboratory for almost-commuting self-adjoint tuples.
#[derive(Debug, Parser)]
#[command(name = "amulab", version, about)]
pub struct Cli {
    /// Worker threads for grid scans and ensembles.
    #[arg(long, global = true, env = "AMULAB_THREADS")]
    pub threads: Option<usize>,

    /// TOML file with tolerance overrides and acceptance settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a model tuple and write it as JSON.
    Gen(GenArgs),
    /// Scan a synthetic spectrum of a tuple.
    Spectrum(SpectrumArgs),
    /// Find AMU witnesses at spectrum centers or at one point.
    Amu(AmuArgs),
    /// Fredholm index of the truncated ladder operator.
    Index(IndexArgs),
    /// Apply a bounded or reparametrizing transform to a tuple.
    Transform(TransformArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub model: GenModel,

    /// Output tuple file.
    #[arg(short, long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenModel {
    /// Position and momentum in the first N oscillator states.
    Hermite {
        #[arg(long = "N", alias = "n")]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        hbar: f64,
    },
    /// Angular momentum on the spin-j block.
    Spin {
        #[arg(long)]
        j: f64,
        #[arg(long, allow_hyphen_values = true)]
        hbar: f64,
    },
    /// Diagonal tuple with the given joint eigenvalues.
    Commuting {
        /// Joint eigenvalue as comma-separated coordinates; repeat per point.
        #[arg(long = "point", required = true, allow_hyphen_values = true, value_delimiter = ';')]
        points: Vec<String>,
        #[arg(long)]
        dim: usize,
    },
    /// Random tuple with max pairwise commutator norm at most delta.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Model descriptor JSON file.
    Descriptor { file: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Euclidean,
    Spherical,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Input tuple file.
    #[arg(long)]
    pub tuple: PathBuf,
    /// Grid radius M (> 1).
    #[arg(long = "M", alias = "m")]
    pub m: f64,
    /// Tolerance eta in (0, 1).
    #[arg(long)]
    pub eta: f64,
    #[arg(long, value_enum, default_value = "euclidean")]
    pub variant: VariantArg,
    /// Output spectrum JSON.
    #[arg(short, long)]
    pub out: PathBuf,
    /// Optional CSV of accepted centers.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AmuArgs {
    #[arg(long)]
    pub tuple: PathBuf,
    /// Spectrum JSON whose accepted centers are scanned.
    #[arg(long, conflicts_with = "lambda", required_unless_present = "lambda")]
    pub spectrum: Option<PathBuf>,
    /// Single point as comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub epsilon: f64,
    /// Output witness report JSON.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Optional per-center CSV (spectrum scans only).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long = "N", alias = "n")]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub hbar: f64,
    /// Singular values below sigma_max / ratio count as near-null.
    #[arg(long, default_value_t = 1e6)]
    pub ratio: f64,
    /// Trailing coordinates treated as the truncation edge (default N/4).
    #[arg(long)]
    pub edge: Option<usize>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TransformKind {
    /// `(a, b_1, ..., b_n)`
    Bounded,
    /// `h_j (1 + d)^{-1}`
    Tilde,
    /// `(1 + d)^{-1/2} h_j (1 + d)^{-1/2}`
    Bar,
    /// `H_j = h_j (1 + s h_j^2)^{-1}`
    Reparam,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub tuple: PathBuf,
    #[arg(long, value_enum)]
    pub kind: TransformKind,
    /// Reparametrization scale in (0, 1].
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Criterion ids to run, comma-separated (overrides the config).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
    /// Base seed (overrides the config).
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON report path.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// CSV summary path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}
