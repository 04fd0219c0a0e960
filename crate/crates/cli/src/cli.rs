use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(
    name = "ekr",
    version,
    about = "Exact checks for intersecting families of perfect-matching subgraphs"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct GlobalArgs {
    /// Flat TOML file of defaults (see README); flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write data here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Solver threads (0 = all cores, 1 = sequential and reproducible).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Sweep rows solved concurrently.
    #[arg(long, global = true)]
    pub row_threads: Option<usize>,
    #[arg(long, global = true)]
    pub node_limit: Option<u64>,
    /// Seconds per solver call.
    #[arg(long, global = true)]
    pub time_limit: Option<f64>,
    /// Largest order space walked exhaustively.
    #[arg(long, global = true)]
    pub order_cap: Option<u64>,
    /// Largest family handed to the solver.
    #[arg(long, global = true)]
    pub graph_cap: Option<usize>,
    /// Maximum families enumerated per strong-EKR decision (default 10 per vertex).
    #[arg(long, global = true)]
    pub max_families: Option<usize>,
    /// Witness families kept per verdict.
    #[arg(long, global = true)]
    pub witnesses: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// More log output on standard error (repeatable).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Instance {
    /// Number of edges of the matching.
    #[arg(long)]
    pub n: usize,
    /// Full edges per subgraph.
    #[arg(long)]
    pub p: usize,
    /// Singleton vertices per subgraph.
    #[arg(long)]
    pub s: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Family size, star size and the identity tying them together.
    Count(Instance),
    /// List every member, one per line.
    Enumerate(Instance),
    /// Check the interval lemmas for a family over the cyclic orders.
    Verify(VerifyArgs),
    /// Exact EKR verdicts over ranges of (n, p, s).
    EkrSweep(SweepArgs),
    /// Count, per member, the orders realizing it as an interval.
    Doublecount(Instance),
    /// Build a named family (star:<v> or avoid:<v>).
    Construct(ConstructArgs),
    /// EKR verdicts for subgraphs of m disjoint cliques.
    General(GeneralArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub instance: Instance,
    /// star:<vertex>, avoid:<vertex>, or a family file.
    #[arg(long)]
    pub family: String,
    /// Comma-separated subset of 1,2,3,4.
    #[arg(long, default_value = "1,2,3,4")]
    pub lemmas: String,
    /// Walk every restricted order (the default when under the cap).
    #[arg(long, conflicts_with = "sample")]
    pub exhaustive: bool,
    /// Check this many seeded random orders instead.
    #[arg(long)]
    pub sample: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Values of n: "5", "3..6" (inclusive) or "3,5,7".
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub s: String,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub instance: Instance,
    /// star:<vertex> or avoid:<vertex>, e.g. star:l5.
    pub family: String,
}

#[derive(Args, Debug)]
pub struct GeneralArgs {
    /// Number of components.
    #[arg(long)]
    pub m: usize,
    /// Clique size; with --scan, the largest one tried.
    #[arg(long)]
    pub n: usize,
    /// Signature vector, e.g. "1,1" for one K_1 and one K_2.
    #[arg(long)]
    pub sig: String,
    /// Scan clique sizes upward for a run of EKR verdicts.
    #[arg(long)]
    pub scan: bool,
}
