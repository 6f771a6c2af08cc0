//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "hamming", version, about = "Entanglement of free fermions on Hamming graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one measure at one point and print a JSON record.
    Compute(ComputeArgs),
    /// Evaluate a measure over a grid described by a TOML file.
    Sweep(SweepArgs),
    /// Compare closed forms with dense diagonalization on small graphs.
    Certify(CertifyArgs),
    /// Fit the entropy scaling coefficients.
    Fit(FitArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    /// Entanglement entropy of `n` blocks.
    Entropy,
    /// Mutual information of two blocks.
    Mutual,
    /// Tripartite information of three blocks.
    Tripartite,
    /// Ground-state filling fraction.
    Filling,
    /// Chopped correlation spectrum.
    Spectrum,
    /// Mutual-information coefficient `g2(q, r)`.
    G2,
    /// Tripartite coefficient `g3(q, r)`.
    G3,
    /// Finite-distance entropy coefficient `f(n, q, r)`.
    F,
}

impl Measure {
    /// Whether the measure depends on `d` and the Fermi set.
    pub fn uses_graph(self) -> bool {
        !matches!(self, Measure::G2 | Measure::G3 | Measure::F)
    }

    /// Whether the measure is an entropy in nats.
    pub fn is_entropic(self) -> bool {
        !matches!(self, Measure::Filling | Measure::Spectrum)
    }

    pub fn name(self) -> &'static str {
        match self {
            Measure::Entropy => "entropy",
            Measure::Mutual => "mutual",
            Measure::Tripartite => "tripartite",
            Measure::Filling => "filling",
            Measure::Spectrum => "spectrum",
            Measure::G2 => "g2",
            Measure::G3 => "g3",
            Measure::F => "f",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Nearest-neighbour hopping with chemical potential `alpha0`.
    Nn,
    /// Hopping `exp(-c i)` at distance `i`.
    Lr,
    /// Amplitudes given one per distance with `--alphas`.
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(long, value_enum, default_value = "entropy")]
    pub measure: Measure,
    #[arg(long, value_enum, default_value = "nn")]
    pub model: ModelKind,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha0: f64,
    /// Decay rate of the long-range model.
    #[arg(long, default_value_t = 20.0)]
    pub c: f64,
    /// Comma-separated amplitudes `alpha_0, ..., alpha_d`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alphas: Option<Vec<f64>>,
    /// Word length. Not needed for coefficient measures.
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub q: u32,
    /// Number of blocks. Mutual and tripartite information fix it to 2 and 3.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Number of fixed letters per block.
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Fill modes `0..=k0` instead of asking the hopping model.
    #[arg(long, conflicts_with = "fermi_set")]
    pub k0: Option<u32>,
    /// Comma-separated occupied modes, overriding the hopping model.
    #[arg(long, value_delimiter = ',')]
    pub fermi_set: Option<Vec<u32>>,
    /// Report entropies in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML sweep description.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; overrides the config. `-` writes to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Largest vertex count `q^d`; defaults to `HAMMING_ORACLE_CAP` or 1024.
    #[arg(long)]
    pub cap: Option<u64>,
    /// Number of random non-contiguous Fermi sets.
    #[arg(long, default_value_t = 200)]
    pub noncontiguous: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Write the full JSON report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Shift every closed-form eigenvalue by this amount.
    #[arg(long, hide = true, default_value_t = 0.0)]
    pub corrupt: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(subcommand)]
    pub regime: FitRegime,
}

#[derive(Debug, Subcommand)]
pub enum FitRegime {
    /// Linear fit of `S / (V_A (r/d)^(1/2))` against `r/d` at `k0 = d/q`.
    BetaGamma {
        #[arg(long, value_delimiter = ',')]
        r: Option<Vec<u32>>,
        #[arg(long, value_delimiter = ',')]
        d_over_r: Option<Vec<u32>>,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u32>>,
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<u32>>,
    },
    /// Volume-law coefficient at fixed `delta = 1 - r/d`.
    BetaTilde {
        #[arg(long)]
        delta: f64,
        #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000,8000")]
        d: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        n: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        q: Vec<u32>,
    },
}
