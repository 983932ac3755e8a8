//! `kcycle`: command-line access to the renewal, pairing-model, cycle-factor,
//! intersection-pattern, conditioning and comb-embedding experiments.
//!
//! Exit status is 0 on success, 1 on a computational failure (a search that
//! ran out of budget, an embedding that failed, a comb that does not verify)
//! and 2 on a usage error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kcycle_core::renewal::Variant;
use kcycle_core::LengthMultiset;

use output::{write_output, Format};

#[derive(Debug, Parser)]
#[command(name = "kcycle", version, about = "Exact and Monte Carlo experiments on k-cycle factors and renewal processes")]
#[command(arg_required_else_help = true, propagate_version = true)]
pub struct Cli {
    /// Master seed; trial i of a run draws from the stream (seed, i).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result to this file instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for Monte Carlo loops (0 = one per core). Results do not depend on it.
    #[arg(long, global = true, env = "KCYCLE_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact probability that a renewal process over a length multiset hits k.
    Renewal(RenewalArgs),
    /// Coefficients of the step series, its renewal series or the correction series.
    Series(SeriesArgs),
    /// Sample a graph and print it as an edge list.
    Sample(SampleArgs),
    /// Short-cycle counts of a graph, or Monte Carlo means over random pairings.
    Census(CensusArgs),
    /// Cycle-factor counts, first moments and existence scans.
    #[command(subcommand)]
    Factors(FactorsCommand),
    /// Intersection patterns: counts, second-moment assembly, Psi ledgers.
    #[command(subcommand)]
    Patterns(PatternsCommand),
    /// Exact E[Y_k^2] / E[Y_k]^2 at small n.
    SecondMoment(SecondMomentArgs),
    /// Small-subgraph-conditioning constants and experiments.
    #[command(subcommand)]
    Conditioning(ConditioningCommand),
    /// Comb embedding in random or given graphs.
    #[command(subcommand)]
    Comb(CombCommand),
    /// Threshold K0(n) against sampled cycle-factor existence for several n.
    ThresholdScan(ThresholdScanArgs),
}

#[derive(Debug, Args)]
pub struct RenewalArgs {
    /// Length multiset as `length:count` pairs, e.g. `2:5,3:4`.
    #[arg(long)]
    pub lengths: LengthMultiset,
    #[arg(long)]
    pub k: u64,
    /// with, without or size-biased.
    #[arg(long, default_value = "without")]
    pub variant: Variant,
    /// Also run the exhaustive ordering oracle (m <= 9).
    #[arg(long)]
    pub oracle: bool,
    /// Also estimate the probability from this many simulated orderings.
    #[arg(long)]
    pub mc_trials: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SeriesKind {
    /// The step series f(z).
    Step,
    /// 1 / (1 - f(z)).
    Renewal,
    /// (f(z^2) - f(z)^2) / (1 - f(z))^3.
    Correction,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Step law from a length multiset; defaults to the geometric g(z) = z^2 / (2 - z).
    #[arg(long)]
    pub lengths: Option<LengthMultiset>,
    /// Truncation order T.
    #[arg(long = "T", default_value_t = 40)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = SeriesKind::Renewal)]
    pub kind: SeriesKind,
    /// Compute in floating point instead of exact rationals.
    #[arg(long)]
    pub float: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Model {
    /// Projected configuration-model pairing.
    Config,
    /// Configuration model conditioned on simplicity by rejection.
    Simple,
    /// Pairing plus a uniform k-cycle factor, conditioned on simplicity.
    Superposition,
    /// Erdős–Rényi G(n, p).
    Gnp,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value_t = Model::Config)]
    pub model: Model,
    #[arg(long)]
    pub n: usize,
    /// Degree for the configuration models.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Cycle length for the superposition model.
    #[arg(long)]
    pub k: Option<usize>,
    /// Edge probability for G(n, p).
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    /// Edge-list file to census.
    #[arg(long, conflicts_with_all = ["n", "samples"])]
    pub graph: Option<PathBuf>,
    /// Largest cycle length counted.
    #[arg(long, default_value_t = 4)]
    pub max_length: usize,
    /// Vertices of sampled cubic pairings.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of sampled pairings.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Compare X_3 under the configuration model and under the superposition
    /// with a k-cycle factor, instead of reporting means.
    #[arg(long, value_name = "K", requires_all = ["n", "samples"])]
    pub superposition_diagnostic: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum FactorsCommand {
    /// Count k-cycle factors of a cubic multigraph.
    Count {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Exact and asymptotic E[Y_k] and E[cf_k].
    Moments {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Existence frequency and mean cf_k for every divisor k >= 3 of n.
    Scan {
        #[arg(long)]
        n: usize,
        /// Scan all divisors k >= 3 of n (the only supported mode).
        #[arg(long, default_value_t = true)]
        k_divisors: bool,
        #[arg(long, default_value_t = 200)]
        samples: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum PatternsCommand {
    /// |I_{h,m}|, the number of patterns with h k-cycles and m paths.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        h: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Also count by exhaustive enumeration (n <= 10).
        #[arg(long)]
        verify: bool,
    },
    /// Exact second-moment assembly with per-class sums.
    SecondMoment(SecondMomentArgs),
    /// Psi_h(m) and the normalized Psi-hat ledger as CSV.
    Psi {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Path-length statistics of uniform patterns in I_{0,m}.
    Paths {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
    /// Delta-normality of a length multiset.
    Normality {
        #[arg(long)]
        lengths: LengthMultiset,
        #[arg(long)]
        delta: f64,
        /// Cycle length k.
        #[arg(long, conflicts_with = "ln_k")]
        k: Option<u64>,
        /// ln k, for k too large to write down.
        #[arg(long)]
        ln_k: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct SecondMomentArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Also enumerate every pairing and compare (n <= 6).
    #[arg(long)]
    pub verify_direct: bool,
}

#[derive(Debug, Subcommand)]
pub enum ConditioningCommand {
    /// Exact partial sum of lambda_i delta_i^2 for i <= T.
    SumCheck {
        #[arg(long = "T")]
        t: u32,
    },
    /// lambda_i, delta_i and lambda_i (1 + delta_i) for i = 1..=I.
    Constants {
        #[arg(long = "I", default_value_t = 8)]
        max_i: u32,
    },
    /// Draws of the truncated limit variable W_J.
    SampleW {
        #[arg(long = "J")]
        j: u32,
        #[arg(long, default_value_t = 100_000)]
        batch: u64,
    },
    /// E[X_i] over pairings that contain a planted k-cycle factor.
    Planted {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        i: u32,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Plant a fresh uniform factor in each trial.
        #[arg(long)]
        random_plant: bool,
    },
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Pipeline attempts per run.
    #[arg(long, default_value_t = 4)]
    pub attempts: u32,
    /// Exchange steps of the block repair walk.
    #[arg(long, default_value_t = 20_000)]
    pub repair_steps: u64,
    /// Stop the repair walk after this many steps without progress.
    #[arg(long, default_value_t = 2_000)]
    pub repair_stall: u64,
}

#[derive(Debug, Subcommand)]
pub enum CombCommand {
    /// Embed a comb of order k, in G(n, p) or in a given graph.
    Embed {
        #[arg(long, required_unless_present = "graph")]
        n: Option<usize>,
        #[arg(long)]
        k: usize,
        /// p = p_mult * ln(n) / n.
        #[arg(long, conflicts_with = "p")]
        p_mult: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        /// Embed in this edge-list graph instead of sampling.
        #[arg(long, conflicts_with_all = ["n", "p_mult", "p"])]
        graph: Option<PathBuf>,
        /// Number of consecutive seeds starting at --seed.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        /// Write 0 in the millis column so output is reproducible byte for byte.
        #[arg(long)]
        no_timing: bool,
        /// Write the first embedded comb here as JSON.
        #[arg(long)]
        comb_out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Check a comb JSON file against an edge-list graph.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        comb: PathBuf,
    },
    /// Search for a k-cycle factor, in G(n, p) or in a given graph.
    Factor {
        #[arg(long, required_unless_present = "graph")]
        n: Option<usize>,
        #[arg(long)]
        k: usize,
        #[arg(long, conflicts_with = "p")]
        p_mult: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, conflicts_with_all = ["n", "p_mult", "p"])]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Debug, Args)]
pub struct ThresholdScanArgs {
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub samples: u64,
}

/// Whether the command produced its intended result.
pub enum Status {
    Success,
    Failure,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli.command, cli.seed) {
        Ok((report, status)) => {
            if let Err(e) = write_output(&report.render(cli.format, cli.seed), &cli.output) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            match status {
                Status::Success => ExitCode::SUCCESS,
                Status::Failure => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.chain().any(|c| c.downcast_ref::<kcycle_core::Error>().is_some_and(|k| k.is_usage()));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
