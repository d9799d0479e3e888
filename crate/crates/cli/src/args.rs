use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use randmatch::coupling::CouplingVariant;

#[derive(Debug, Parser)]
#[command(name = "randmatch", version, about = "Glauber-dynamics matching sampler with exact state-space oracles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit flat CSV rows instead of JSON.
    #[arg(long, global = true)]
    pub csv: bool,

    /// Worker threads for sweeps and restarts. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// Write the report (for `gen`, the graph) to this path.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph and print it in edge-list form.
    Gen(GraphSource),
    /// Exact maximum matching.
    Solve(GraphSource),
    /// One sampler run from the empty matching.
    Sample(ChainArgs),
    /// Best of several independent sampler runs.
    Randmatching(ChainArgs),
    /// Exact Gibbs, mixing and conductance summary.
    Analyze(ExactArgs),
    /// Exact worst-case mixing time and its distance curve.
    Mix(ExactArgs),
    /// Exhaustive coupling sweeps: contraction and marginal fidelity.
    Coupling(CouplingArgs),
    /// Exact conductance and the maximum-matching cut.
    Conductance(ExactArgs),
    /// Sampler throughput.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Path,
    Cycle,
    Star,
    Complete,
    Gnp,
    #[value(alias = "bipartite_regular")]
    BipartiteRegular,
}

#[derive(Debug, Clone, Args)]
pub struct GraphSource {
    /// Edge-list file.
    #[arg(long, conflicts_with = "family")]
    pub graph: Option<PathBuf>,
    #[arg(long, requires = "n")]
    pub family: Option<FamilyName>,
    /// Vertex count (per side for bipartite-regular).
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability for gnp.
    #[arg(long)]
    pub p: Option<f64>,
    /// Degree for bipartite-regular.
    #[arg(long)]
    pub d: Option<usize>,
    /// Seed for random families and for the sampler.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub source: GraphSource,
    /// Fugacity exponent; defaults to m.
    #[arg(long, allow_negative_numbers = true)]
    pub log2_lambda: Option<f64>,
    /// Steps per run; defaults to ceil(10 m ln n).
    #[arg(long)]
    pub steps: Option<u64>,
    /// Independent runs; defaults to ceil(10 ln n).
    #[arg(long)]
    pub restarts: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long, allow_negative_numbers = true)]
    pub log2_lambda: Option<f64>,
    /// Distance threshold for the mixing time; defaults to 1/(2e).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = randmatch::enumerate::DEFAULT_STATE_CAP)]
    pub state_cap: usize,
    /// Largest space scanned exhaustively for the conductance.
    #[arg(long, default_value_t = randmatch::analysis::DEFAULT_CUT_CAP)]
    pub cut_cap: usize,
    /// Step cap for the mixing-time scan.
    #[arg(long, default_value_t = randmatch::analysis::DEFAULT_T_MAX)]
    pub t_max: usize,
}

fn parse_variant(s: &str) -> Result<CouplingVariant, String> {
    s.parse().map_err(|e: randmatch::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct CouplingArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long, allow_negative_numbers = true)]
    pub log2_lambda: Option<f64>,
    /// `a` (paper_faithful) or `b` (synchronous).
    #[arg(long, default_value = "a", value_parser = parse_variant)]
    pub variant: CouplingVariant,
    #[arg(long, default_value_t = randmatch::enumerate::DEFAULT_STATE_CAP)]
    pub state_cap: usize,
    /// Largest number of ordered state pairs swept.
    #[arg(long, default_value_t = randmatch::coupling::DEFAULT_PAIR_CAP)]
    pub pair_cap: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Measure per-step cost on gnp graphs with n = 10^3, 10^4, 10^5
    /// instead of the given graph.
    #[arg(long)]
    pub scaling: bool,
    /// Mean degree of the scaling graphs.
    #[arg(long, default_value_t = 8.0)]
    pub degree: f64,
}
