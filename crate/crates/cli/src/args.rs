use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "fmtlab", version, about = "Depth-n theories, ordered sums and random graphs with order")]
pub struct Cli {
    /// JSON experiment file supplying defaults for pseq, formula, formula_name, n, samples and seed.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for sampling commands; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for NRange {
    type Err = String;

    /// `A..B` (inclusive) or a single `N`.
    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad size `{t}`"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
            None => (num(s)?, num(s)?),
        };
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        Ok(NRange { lo, hi })
    }
}

#[derive(Debug, Args, Clone, Default)]
pub struct FormulaArgs {
    /// Sentence text, e.g. "E x0. A x1. ~R(x0,x1)".
    #[arg(long)]
    pub formula: Option<String>,
    /// Name of a built-in sentence (psi0, psi0_strict, has_edge, ...).
    #[arg(long)]
    pub formula_name: Option<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct RandomArgs {
    /// Edge probability sequence: geometric:c,q | power:c,s | finite:p1,p2,... | zero.
    #[arg(long)]
    pub pseq: Option<String>,
    /// Number of points, `N` or `A..B`.
    #[arg(long)]
    pub n: Option<NRange>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write CSV or JSON output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Th,
    Bth,
    Uth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Lift {
    Sim,
    Dis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Exact,
    Chisq,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a sentence on a structure file.
    Check {
        #[arg(long)]
        structure: PathBuf,
        #[command(flatten)]
        formula: FormulaArgs,
    },
    /// Print the serialized theory of a tuple.
    Theory {
        #[arg(long)]
        structure: PathBuf,
        /// Comma-separated elements; for `uth` these are index elements.
        #[arg(long, default_value = "")]
        tuple: String,
        #[arg(long, default_value_t = 1)]
        depth: u32,
        #[arg(long, default_value_t = 0)]
        radius: u32,
        /// Comma-separated radii for `uth`, one per tuple element.
        #[arg(long)]
        radii: Option<String>,
        #[arg(long, value_enum, default_value = "th")]
        kind: Kind,
        /// How to turn the structure into a two-sorted system for `bth` and `uth`.
        #[arg(long, value_enum, default_value = "dis")]
        lift: Lift,
    },
    /// Compose sentence theories of structure files and compare with the sum.
    Compose {
        #[arg(long, required = true)]
        structure: Vec<PathBuf>,
        #[arg(long, default_value_t = 2)]
        depth: u32,
    },
    /// Draw one graph with order and write it as a structure file.
    Sample {
        #[command(flatten)]
        random: RandomArgs,
    },
    /// Monte Carlo estimate of a sentence probability, one CSV row per size.
    Estimate {
        #[command(flatten)]
        formula: FormulaArgs,
        #[command(flatten)]
        random: RandomArgs,
    },
    /// Estimates over a size range with successive differences.
    Vwlaw {
        #[command(flatten)]
        formula: FormulaArgs,
        #[command(flatten)]
        random: RandomArgs,
    },
    /// Check the drunkard coupling against the ordinary law.
    Coupling {
        #[command(flatten)]
        random: RandomArgs,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        k_star: usize,
        #[arg(long, default_value_t = 0)]
        d_theta: u32,
        #[arg(long)]
        stride: Option<usize>,
        /// Comma-separated cutpoints m_0,...,m_k; chosen from epsilon when absent.
        #[arg(long)]
        cutpoints: Option<String>,
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        /// padded or literal.
        #[arg(long, default_value = "padded")]
        layout: String,
    },
    /// Print bound values.
    Bounds {
        /// Lower bound 1/(k0 2^k0).
        #[arg(long)]
        zeta_lower: Option<u32>,
        /// ξ_k for the recursion bounds.
        #[arg(long)]
        xi_k: Option<String>,
        #[arg(long)]
        ell: Option<usize>,
        /// Comma-separated ξ_0,...,ξ_{ℓ-1} for the binomial bound.
        #[arg(long)]
        xi_table: Option<String>,
        #[arg(long)]
        j0: Option<usize>,
        #[arg(long)]
        xi_j0: Option<String>,
        /// Number of sentence theories c for the Ramsey bound.
        #[arg(long)]
        ramsey_c: Option<u64>,
        /// Exhaustive ζ_k over the order alphabet.
        #[arg(long)]
        exact_zeta: Option<usize>,
        #[arg(long, default_value_t = 1)]
        depth: u32,
    },
    /// Run the acceptance suites; exit 1 if any fails.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Comma-separated suite numbers; all when absent.
        #[arg(long)]
        only: Option<String>,
        /// Smaller sample sizes for a fast smoke run.
        #[arg(long)]
        quick: bool,
    },
}
