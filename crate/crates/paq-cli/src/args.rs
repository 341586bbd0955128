//! Command-line surface: one subcommand per operation family, plus the
//! global input/output flags shared by all of them.

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "paq",
    about = "Entropic exponents and exact hashing simulation for privacy \
             amplification against quantum side information",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Input state or channel file (JSON).
    #[arg(long, global = true)]
    pub state: Option<std::path::PathBuf>,

    /// Use a bundled fixture instead of a state file
    /// (uniform-bit, correlated-bit, product-uniform-2bit, classical-quarter,
    /// random-qubit).
    #[arg(long, global = true, conflicts_with = "state")]
    pub fixture: Option<String>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Display units for rates, entropies, and exponents.
    #[arg(long, global = true, value_enum, default_value_t = Units::Nats)]
    pub units: Units,

    /// Seed for all randomized operations.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for parallel sweeps (0 = implementation default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Nats,
    Bits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Ach,
    Conv,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Pa,
    Wiretap,
    Ea,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    Exact,
    Mc,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conditional Rényi entropies and mutual informations of a c-q state.
    Entropy {
        /// Comma-separated Rényi orders (α = 1 gives the von Neumann limit).
        #[arg(long, value_delimiter = ',', default_value = "0.75,1,1.5,2")]
        alpha: Vec<f64>,

        /// Entropy kinds: down, star, down_star, i_down, i_star.
        #[arg(long, value_delimiter = ',', default_value = "down,star,down_star")]
        kind: Vec<String>,
    },

    /// Exponents and finite-blocklength bounds for a rate list.
    Exponent {
        #[arg(long, value_enum)]
        family: Family,

        #[arg(long, value_enum)]
        side: Side,

        /// Rates in the selected units (for wiretap: log L; error: log ML).
        #[arg(long, value_delimiter = ',', required = true)]
        rate: Vec<f64>,

        /// Blocklengths at which bound values are tabulated.
        #[arg(long, value_delimiter = ',', default_value = "1,10,100")]
        n: Vec<u64>,

        /// Prior over channel inputs when --state is a wiretap channel file.
        #[arg(long, value_delimiter = ',')]
        prior: Option<Vec<f64>>,

        /// Tradeoff-function value f(w) (family ea).
        #[arg(long)]
        f_w: Option<f64>,

        /// The constant V > 2 (family ea).
        #[arg(long)]
        v_const: Option<f64>,

        /// Pr[wt(T₁ⁿ) = w] (family ea).
        #[arg(long)]
        prob_w: Option<f64>,
    },

    /// Exact or sampled ε_PA of hashing a state, optionally the full
    /// bound-sandwich report.
    Simulate {
        /// Field exponent: the state alphabet must be 2^u.
        #[arg(long)]
        u: u32,

        /// Extracted bits per copy (1 ≤ v ≤ u).
        #[arg(long)]
        v: u32,

        /// Number of i.i.d. copies.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        n: Vec<u32>,

        #[arg(long, value_enum, default_value_t = SimMode::Exact)]
        mode: SimMode,

        /// Monte-Carlo trials (mode mc).
        #[arg(long, default_value_t = 1000)]
        trials: u64,

        /// Include the per-hash distance breakdown (exact mode).
        #[arg(long)]
        breakdown: bool,

        /// Compare the exact value against both bounds per n.
        #[arg(long)]
        sandwich: bool,
    },

    /// Expected wiretap leakage `E[d₁]` with codebook and hash averaging.
    Wiretap {
        /// Message-set size M (power of two, ≥ 2).
        #[arg(long, short)]
        m: u64,

        /// Hash-randomness size L (power of two).
        #[arg(long, short)]
        l: u64,

        /// Prior over channel inputs (defaults to uniform).
        #[arg(long, value_delimiter = ',')]
        prior: Option<Vec<f64>>,

        #[arg(long, value_enum, default_value_t = SimMode::Exact)]
        mode: SimMode,

        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },

    /// Numeric lemma battery; exits nonzero if any check fails.
    Verify {
        /// Check names to run (default: all).
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,

        #[arg(long, default_value_t = 10_000)]
        trace_trials: u64,

        #[arg(long, default_value_t = 1_000)]
        concavity_trials: u64,

        #[arg(long, default_value_t = 1_000)]
        helstrom_trials: u64,
    },

    /// Moderate-deviation tables along the schedule a_n = n^{−t}.
    Moderate {
        /// pa-ach, pa-conv, wt-ach, wt-conv, ea-ach, or ea-conv.
        #[arg(long)]
        kind: String,

        /// Schedule exponent t ∈ (0, 1/2).
        #[arg(long, default_value_t = 0.3)]
        t: f64,

        /// Blocklengths (strictly increasing).
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000,1000000")]
        n: Vec<u64>,

        #[arg(long)]
        f_w: Option<f64>,

        #[arg(long)]
        v_const: Option<f64>,

        #[arg(long)]
        prob_w: Option<f64>,
    },

    /// Entropy-accumulation bound values.
    Ea {
        #[arg(long, value_enum)]
        side: Side,

        #[arg(long)]
        f_w: f64,

        #[arg(long)]
        v_const: f64,

        #[arg(long)]
        prob_w: f64,

        /// Rates in the selected units.
        #[arg(long, value_delimiter = ',', required = true)]
        rate: Vec<f64>,

        #[arg(long, value_delimiter = ',', default_value = "1000")]
        n: Vec<u64>,
    },
}
