mod args;
mod commands;
mod verify;

use args::{Cli, Command};
use chrono::Utc;
use clap::error::ErrorKind;
use clap::Parser;
use primechain::bigreal::{BigRealError, PrecisionPolicy};
use primechain::chains::{ChainError, Engine};
use primechain::primality::PrimeTester;
use primechain::store::{ChainStore, Record, RunManifest};
use std::process::ExitCode;
use std::time::Instant;

pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_UNDECIDED: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

/// How a command ended; maps onto the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or unreadable input.
    Usage(String),
    /// A published value was contradicted.
    Mismatch(String),
    /// Not enough digits or precision to decide.
    Undecided(String),
    /// Any other error from the library, passed through verbatim.
    Compute(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Mismatch(_) | Failure::Compute(_) => EXIT_MISMATCH,
            Failure::Undecided(_) => EXIT_UNDECIDED,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Mismatch(m) | Failure::Undecided(m) | Failure::Compute(m) => m,
        }
    }
}

impl From<ChainError> for Failure {
    fn from(e: ChainError) -> Failure {
        match e {
            ChainError::PrecisionExhausted { .. } | ChainError::Real(BigRealError::Precision(_)) => {
                Failure::Undecided(e.to_string())
            }
            _ => Failure::Compute(e.to_string()),
        }
    }
}

/// State shared by the commands of one run.
pub struct Context {
    pub engine: Engine,
    pub store: ChainStore,
    pub records: Vec<Record>,
    pub rng_seeds: Vec<u64>,
    pub config: serde_json::Value,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let started = Utc::now();
    let clock = Instant::now();
    let defaults = PrecisionPolicy::default();
    let max_bits = cli.global.precision_max_bits;
    let precision = match PrecisionPolicy::new(defaults.start_bits.min(max_bits), max_bits, defaults.growth) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: --precision-max-bits: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut ctx = Context {
        engine: Engine::new(PrimeTester::new(cli.global.prp_extra_rounds), precision),
        store: ChainStore::new(&cli.global.store),
        records: Vec::new(),
        rng_seeds: Vec::new(),
        config: serde_json::to_value(&cli).expect("arguments serialize"),
    };
    let result = match &cli.command {
        Command::Verify { target, depth } => verify::run(&mut ctx, *target, *depth),
        Command::Generate {
            seed_file,
            seed,
            rule,
            count,
            first,
            policy,
        } => commands::generate(&mut ctx, seed_file.as_deref(), seed.as_deref(), rule, *count, *first, *policy),
        Command::Recover {
            chain_file,
            rule,
            offset,
        } => commands::recover(&mut ctx, chain_file, rule, *offset),
        Command::Search { config_file } => commands::search(&mut ctx, config_file, &cli.global),
        Command::Tree { limit, exponent, dot } => commands::tree(&mut ctx, *limit, exponent, dot.as_deref()),
    };
    let (code, outcome) = match &result {
        Ok(summary) => (0, format!("ok: {summary}")),
        Err(f) => {
            eprintln!("error: {}", f.message());
            (f.code(), format!("exit {}: {}", f.code(), f.message()))
        }
    };
    let manifest = RunManifest {
        command_line: std::env::args().collect(),
        config: ctx.config.clone(),
        rng_seeds: ctx.rng_seeds.clone(),
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        started: started.to_rfc3339(),
        wall_time_secs: clock.elapsed().as_secs_f64(),
        outcome,
    };
    ctx.records.push(Record::Manifest(manifest));
    if let Err(e) = ctx.store.append_all(&ctx.records) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_MISMATCH.max(code));
    }
    ExitCode::from(code)
}
