use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser, Serialize)]
#[command(name = "primechain", version, about = "Prime-representing recurrences: verify, generate, recover, search, trees")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Largest working precision, in bits, before a term counts as undecidable.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    pub precision_max_bits: u32,
    /// Random-base strong rounds run after Baillie-PSW.
    #[arg(long, global = true, default_value_t = 2)]
    pub prp_extra_rounds: u32,
    /// Overrides the seed of the search schedule.
    #[arg(long, global = true)]
    pub rng_seed: Option<u64>,
    /// Overrides the search time budget, in seconds.
    #[arg(long, global = true)]
    pub time_budget: Option<f64>,
    /// Line-delimited JSON store that receives every artifact.
    #[arg(long, global = true, env = "PRIMECHAIN_STORE", default_value = "primechain.jsonl")]
    pub store: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Check a published constant against its published sequence.
    Verify {
        target: Target,
        /// Number of terms; each target has its own default.
        depth: Option<u64>,
    },
    /// Iterate a rule from seed digits.
    Generate {
        /// File holding the seed's decimal digits (line continuations allowed).
        #[arg(long, conflicts_with = "seed", required_unless_present = "seed")]
        seed_file: Option<PathBuf>,
        /// Seed digits given inline.
        #[arg(long)]
        seed: Option<String>,
        /// Rule spec such as `power:5/4:nearest`, `exp2`, `shift:10`, `nn:3`.
        #[arg(long)]
        rule: String,
        #[arg(long, default_value_t = 10)]
        count: u64,
        /// First orbit index to emit; defaults to the rule's first index.
        #[arg(long)]
        first: Option<u64>,
        #[arg(long, value_enum, default_value_t = PolicyArg::Nearest)]
        policy: PolicyArg,
    },
    /// Recover seed digits reproducing a chain.
    Recover {
        /// A chain record (JSON), or whitespace/comma separated primes.
        chain_file: PathBuf,
        /// Rule for plain prime lists.
        #[arg(long, default_value = "power:3/2")]
        rule: String,
        /// Orbit index of the first prime in a plain list; defaults to the
        /// rule's first index.
        #[arg(long)]
        offset: Option<u64>,
    },
    /// Anneal for long chains; the config is TOML with a `rule` key and
    /// search parameters.
    Search { config_file: PathBuf },
    /// Build the prime forest up to a limit.
    Tree {
        limit: u64,
        #[arg(default_value = "3/2")]
        exponent: String,
        /// Write the forest as a DOT digraph here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Mills,
    Wright,
    Plouffe54,
    Plouffe32,
    ScaledNn,
    Concat,
    AppendixS50,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyArg {
    Nearest,
    NextAbove,
}
