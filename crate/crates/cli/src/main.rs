//! Experiment front-end: chain sampling, coupled runs, statistical and exact
//! verification suites, fixed-point sweeps, annealing, exact TV decay, and
//! bound calculators. Every run echoes its fully resolved configuration into
//! the output for reproducibility; identical configurations (seed included)
//! produce byte-identical artifacts.
//!
//! Exit codes: 0 success, 1 an experiment assertion failed (a verified bound
//! or invariant was violated) or a runtime failure, 2 usage error, 3 a state
//! cap was exceeded.

// Parameter guards use `!(x > lo)` so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "glauber",
    about = "Heat-bath chains on colorings and independent sets, their couplings, and verification suites",
    version,
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Where the instance comes from: a graph file or a generator spec.
#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct GraphSource {
    /// Graph file in `n m` / `u v` text format.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Generator spec, e.g. `cycle:6`, `complete-bipartite:3,3`,
    /// `random-bipartite-regular:10,3,1`.
    #[arg(long = "gen", value_name = "SPEC", conflicts_with = "graph")]
    pub generator: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Exact,
    Mcmc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainKind {
    Coloring,
    Hardcore,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnnealMode {
    Paper,
    Practical,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the coloring heat-bath chain and log the minimum available-color
    /// count along the trajectory.
    SampleColorings(SampleColoringsArgs),
    /// Run the hard-core heat-bath chain and log set size and unblocked
    /// counts along the trajectory.
    SampleHardcore(SampleHardcoreArgs),
    /// Coupled coloring chains over independent replicas; logs per-step
    /// Hamming distance.
    CoupleColorings(CoupleColoringsArgs),
    /// Coupled hard-core chains over independent replicas.
    CoupleHardcore(CoupleHardcoreArgs),
    /// Statistical check of the available-color uniformity bound.
    VerifyLemma21(VerifyLemma21Args),
    /// Exact one-step contraction check for coloring pairs under the
    /// available-color slack hypothesis.
    VerifyLemma23(VerifyLemma23Args),
    /// Statistical check of the unblocked-neighbor uniformity window.
    VerifyLemma42(VerifyLemma42Args),
    /// Exact one-step contraction check for independent-set pairs under the
    /// unblocked-count hypothesis.
    VerifyLemma48(VerifyLemma48Args),
    /// Containment sweep of the perturbed fixed-point iteration.
    FixedPointSweep(FixedPointSweepArgs),
    /// Fugacity-ladder annealing sampler.
    Anneal(AnnealArgs),
    /// Exact total-variation decay and mixing time on an enumerable instance.
    ExactTv(ExactTvArgs),
    /// Mixing-time and meeting-probability bound calculators.
    Bounds(BoundsArgs),
}

#[derive(Args, Debug, serde::Serialize)]
pub struct SampleColoringsArgs {
    #[command(flatten)]
    pub source: GraphSource,
    /// Palette size.
    #[arg(long)]
    pub k: u32,
    /// Chain steps.
    #[arg(long, default_value_t = 1000)]
    pub steps: u64,
    /// Log every this many steps.
    #[arg(long, default_value_t = 1)]
    pub record_every: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (`step,min_available`); JSON summary goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct SampleHardcoreArgs {
    #[command(flatten)]
    pub source: GraphSource,
    /// Fugacity (rational or decimal, e.g. `1/2` or `0.5`).
    #[arg(long)]
    pub lambda: String,
    #[arg(long, default_value_t = 1000)]
    pub steps: u64,
    #[arg(long, default_value_t = 1)]
    pub record_every: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (`step,set_size,min_u,max_u`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct CoupleColoringsArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long)]
    pub k: u32,
    /// Steps per replica.
    #[arg(long, default_value_t = 100)]
    pub steps: u64,
    #[arg(long, default_value_t = 100)]
    pub replicas: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (`replica,step,distance`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct CoupleHardcoreArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long)]
    pub lambda: String,
    #[arg(long, default_value_t = 100)]
    pub steps: u64,
    #[arg(long, default_value_t = 100)]
    pub replicas: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct VerifyLemma21Args {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = SamplerKind::Exact)]
    pub sampler: SamplerKind,
    /// Burn-in steps per sample for the mcmc sampler.
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Enumeration cap for the exact sampler and ground truth.
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Histogram CSV of the sampled minimum available-color counts
    /// (`bin_lo,bin_hi,count`).
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct VerifyLemma23Args {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long)]
    pub k: u32,
    /// Slack parameter, rational (e.g. `1/2`).
    #[arg(long)]
    pub beta: String,
    /// Check all ordered pairs when the state count is at most this.
    #[arg(long, default_value_t = 200)]
    pub exhaustive_limit: usize,
    /// Number of random pairs when above the exhaustive limit.
    #[arg(long, default_value_t = 10_000)]
    pub pairs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct VerifyLemma42Args {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub zeta: f64,
    #[arg(long)]
    pub xi: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = SamplerKind::Exact)]
    pub sampler: SamplerKind,
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Histogram CSV of the sampled min/max unblocked counts
    /// (`stat,bin_lo,bin_hi,count`).
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct VerifyLemma48Args {
    #[command(flatten)]
    pub source: GraphSource,
    /// Fugacity, rational.
    #[arg(long)]
    pub lambda: String,
    /// Slack parameter, rational.
    #[arg(long)]
    pub zeta: String,
    #[arg(long, default_value_t = 200)]
    pub exhaustive_limit: usize,
    #[arg(long, default_value_t = 10_000)]
    pub pairs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct FixedPointSweepArgs {
    /// Comma-separated slack grid.
    #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub zetas: String,
    /// Comma-separated target-width grid.
    #[arg(long, default_value = "0.01,0.05,0.1,0.5")]
    pub xis: String,
    /// Output CSV (`c,zeta,xi,feasible,t_bound,t_actual,contained`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct AnnealArgs {
    #[command(flatten)]
    pub source: GraphSource,
    /// Target fugacity, rational or decimal.
    #[arg(long)]
    pub lambda: String,
    /// Total variation budget for the final sample.
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub zeta: f64,
    /// `paper` uses the conservative closed-form step counts; `practical`
    /// uses `--ti` or exact-oracle calibration when the instance is
    /// enumerable.
    #[arg(long, value_enum, default_value_t = AnnealMode::Practical)]
    pub mode: AnnealMode,
    /// Uniform per-level step count for practical mode.
    #[arg(long)]
    pub ti: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: usize,
    /// Output JSON: schedule, per-level logs, samples, exact-TV report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct ExactTvArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long, value_enum)]
    pub chain: ChainKind,
    /// Palette size (coloring chain).
    #[arg(long)]
    pub k: Option<u32>,
    /// Fugacity, rational (hard-core chain).
    #[arg(long)]
    pub lambda: Option<String>,
    /// Decay curve length.
    #[arg(long = "T", default_value_t = 100)]
    pub steps: usize,
    /// Also compute the exact mixing time to this accuracy.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Export the kernel as sparse `i j p` triples to this file.
    #[arg(long)]
    pub export_kernel: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: usize,
    /// Output CSV (`step,tv`), worst recurrent start.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct BoundsArgs {
    /// Which calculator: `1.1`, `1.2`, `1.3` (mixing times) or `3.1`
    /// (meeting-failure bound).
    #[arg(long)]
    pub theorem: String,
    #[arg(long)]
    pub diam: u64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub eps: f64,
    /// Per-step failure probability (3.1 only).
    #[arg(long, default_value_t = 0.0)]
    pub bad_prob: f64,
    /// Step count (3.1 only).
    #[arg(long, default_value_t = 0)]
    pub steps: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let argv = match run::merge_config_args(std::env::args().collect()) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(argv);
    match run::dispatch(cli.command) {
        Ok(run::Outcome::Passed) => ExitCode::SUCCESS,
        Ok(run::Outcome::AssertionFailed) => {
            eprintln!("experiment assertion failed (see output artifacts)");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
