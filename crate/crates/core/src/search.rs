//! Simulated annealing over discrete prime choices. A state is a chain;
//! moves re-pick one prime among the alternatives its predecessors allow
//! and regrow the suffix. Seeds are recovered from the best chain at the
//! end.

use crate::bigreal::format_fixed;
use crate::chains::{ChainError, Engine, GrowthRule, Policy, PrimeChain, ScaleRange};
use crate::primality::SearchWindow;
use crate::store::{integer_text, ProgressRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::time::{Duration, Instant};

/// Alternatives considered per position when re-picking a prime.
const ALTERNATIVES_CAP: usize = 32;

pub type Result<T> = std::result::Result<T, ChainError>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub rng_seed: u64,
    pub initial_temperature: f64,
    pub cooling_factor: f64,
    pub steps_per_temperature: u32,
    pub restart_count: u32,
    pub target_length: usize,
    /// Wall-clock budget in seconds, shared by all restarts.
    pub time_budget: f64,
    /// The schedule ends once the temperature falls below this.
    pub min_temperature: f64,
    /// Weight of the growth penalty `log10(last prime) / length`.
    pub lambda: f64,
    /// Range for the first prime of a chain, both ends included.
    #[serde(with = "integer_text")]
    pub start_lo: Integer,
    #[serde(with = "integer_text")]
    pub start_hi: Integer,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            rng_seed: 0,
            initial_temperature: 2.0,
            cooling_factor: 0.95,
            steps_per_temperature: 200,
            restart_count: 8,
            target_length: 8,
            time_budget: 60.0,
            min_temperature: 0.01,
            lambda: 0.01,
            start_lo: Integer::from(2),
            start_hi: Integer::from(1000),
        }
    }
}

impl SearchConfig {
    pub fn check(&self) -> Result<()> {
        let bad = |what: &str| Err(ChainError::Invalid(format!("search config: {what}")));
        if !(self.initial_temperature > 0.0) {
            return bad("initial_temperature must be positive");
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return bad("cooling_factor must lie in (0, 1)");
        }
        if !(self.min_temperature > 0.0) {
            return bad("min_temperature must be positive");
        }
        if self.steps_per_temperature == 0 || self.restart_count == 0 || self.target_length == 0 {
            return bad("steps, restarts and target length must be positive");
        }
        if !(self.time_budget > 0.0) {
            return bad("time_budget must be positive");
        }
        if !(self.lambda >= 0.0) {
            return bad("lambda must not be negative");
        }
        if self.start_lo < 2 || self.start_lo > self.start_hi {
            return bad("start range must satisfy 2 <= start_lo <= start_hi");
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StopReason {
    TargetReached,
    ScheduleDone,
    /// The time budget ran out; the best chain so far is still returned.
    BudgetExhausted,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::TargetReached => "target reached",
            StopReason::ScheduleDone => "schedule done",
            StopReason::BudgetExhausted => "budget exhausted",
        })
    }
}

/// `-length + lambda * log10(last) / length`.
pub fn energy(chain: &PrimeChain, lambda: f64) -> f64 {
    let len = chain.len() as f64;
    let log10 = f64::from(chain.head().significant_bits()) * std::f64::consts::LOG10_2;
    -len + lambda * log10 / len
}

/// Orders chains best first: longer, then lower energy, then
/// lexicographically smaller primes.
fn better(a: &PrimeChain, b: &PrimeChain, lambda: f64) -> Ordering {
    b.len()
        .cmp(&a.len())
        .then_with(|| energy(a, lambda).total_cmp(&energy(b, lambda)))
        .then_with(|| a.primes().cmp(b.primes()))
}

#[derive(Clone, Debug)]
pub struct SearchState {
    pub chain: PrimeChain,
    pub energy: f64,
    pub temperature: f64,
    pub best_so_far: PrimeChain,
}

impl SearchState {
    fn new(chain: PrimeChain, temperature: f64, lambda: f64) -> SearchState {
        SearchState {
            energy: energy(&chain, lambda),
            best_so_far: chain.clone(),
            chain,
            temperature,
        }
    }

    /// Replaces the best chain when `chain` is better; never regresses.
    fn offer(&mut self, chain: &PrimeChain, lambda: f64) {
        if better(chain, &self.best_so_far, lambda) == Ordering::Less {
            self.best_so_far = chain.clone();
        }
    }
}

/// Result of one restart.
#[derive(Clone, Debug)]
pub struct RestartOutcome {
    pub restart: u32,
    pub best: PrimeChain,
    pub stop: StopReason,
    pub moves: u64,
    pub accepted: u64,
    /// Best length at the end of each temperature level.
    pub best_lengths: Vec<usize>,
}

impl RestartOutcome {
    pub fn progress(&self, lambda: f64) -> ProgressRecord {
        ProgressRecord {
            restart: self.restart,
            best_length: self.best.len(),
            best_energy: energy(&self.best, lambda),
            best_primes: self.best.primes().to_vec(),
            provenance: "search".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Best chain over all restarts, with recovered seed digits when a seed
    /// could be certified.
    pub best: PrimeChain,
    pub energy: f64,
    pub stop: StopReason,
    pub restarts: Vec<RestartOutcome>,
}

/// Why [`greedy_extend`] stopped.
#[derive(Clone, Debug, PartialEq)]
pub enum GreedyStop {
    MaxSteps,
    Infeasible { step: u64, window: Option<SearchWindow> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyOutcome {
    pub chain: PrimeChain,
    pub stop: GreedyStop,
}

/// Integers `n` in `[lo, hi]` drawn uniformly.
fn uniform_in(rng: &mut ChaCha8Rng, lo: &Integer, hi: &Integer) -> Integer {
    let span = Integer::from(hi - lo) + 1u32;
    if let Some(s) = span.to_u64() {
        return Integer::from(lo + rng.gen_range(0..s));
    }
    let words = span.significant_bits() / 64 + 2;
    let mut r = Integer::new();
    for _ in 0..words {
        r <<= 64;
        r += rng.gen::<u64>();
    }
    Integer::from(lo + (r % span))
}

fn offset_for(rule: &GrowthRule) -> u64 {
    match rule {
        // a(0) is the real seed; primes start at index 1.
        GrowthRule::Power { .. } => 1,
        _ => rule.first_index(),
    }
}

fn scaled_start(rule: &GrowthRule) -> Option<u64> {
    match rule {
        GrowthRule::ScaledNn { range_start } => Some(*range_start),
        _ => None,
    }
}

/// Per-restart search context.
struct Walker<'a> {
    engine: &'a Engine,
    rule: GrowthRule,
    config: &'a SearchConfig,
    rng: ChaCha8Rng,
    deadline: Instant,
}

impl Walker<'_> {
    fn start_primes(&self) -> Option<SearchWindow> {
        SearchWindow::inclusive(self.config.start_lo.clone(), self.config.start_hi.clone())
    }

    /// A random prime in the start range.
    fn random_start(&mut self) -> Result<Integer> {
        let x = uniform_in(&mut self.rng, &self.config.start_lo, &self.config.start_hi);
        let tester = &self.engine.tester;
        let above = SearchWindow::inclusive(x.clone(), self.config.start_hi.clone())
            .and_then(|w| tester.first_prime_in_window(&w));
        let p = above.or_else(|| self.start_primes().and_then(|w| tester.first_prime_in_window(&w)));
        p.map(|c| c.value)
            .ok_or_else(|| ChainError::Invalid("no prime in the start range".into()))
    }

    fn chain_of(&self, primes: Vec<Integer>) -> Result<PrimeChain> {
        PrimeChain::new(self.rule, Policy::Nearest, offset_for(&self.rule), primes)
    }

    /// Primes that may follow `prefix` (for an empty prefix, those of the
    /// start range).
    fn choices(&self, prefix: &[Integer]) -> Result<Vec<Integer>> {
        if prefix.is_empty() {
            let w = self.start_primes().expect("checked start range");
            return Ok(match w.len().to_u32() {
                Some(n) if n as usize <= ALTERNATIVES_CAP * 64 => {
                    self.engine.tester.primes_in_window(&w).into_iter().map(|c| c.value).collect()
                }
                _ => Vec::new(),
            });
        }
        match scaled_start(&self.rule) {
            Some(n0) => {
                let range = scale_range(prefix, n0)?;
                let n = n0 + prefix.len() as u64;
                Ok(match range.window(n) {
                    Some(w) => self.engine.tester.primes_in_window(&w).into_iter().map(|c| c.value).collect(),
                    None => Vec::new(),
                })
            }
            None => self.engine.alternatives(&self.chain_of(prefix.to_vec())?, ALTERNATIVES_CAP),
        }
    }

    /// Extends `chain` to the target length; `random` picks each prime
    /// uniformly among its alternatives instead of by the nearest policy.
    fn grow(&mut self, chain: PrimeChain, random: bool) -> Result<PrimeChain> {
        let target = self.config.target_length;
        if chain.len() >= target {
            return Ok(chain);
        }
        if !random && scaled_start(&self.rule).is_none() {
            return Ok(self.engine.extend_until(&chain, target - chain.len())?.0);
        }
        let mut primes = chain.primes().to_vec();
        while primes.len() < target {
            let options = self.choices(&primes)?;
            if options.is_empty() {
                break;
            }
            let pick = if random {
                options[self.rng.gen_range(0..options.len())].clone()
            } else {
                self.nearest_scaled(&primes, options)?
            };
            primes.push(pick);
        }
        self.chain_of(primes)
    }

    /// The option closest to the midpoint image of the scale range.
    fn nearest_scaled(&self, prefix: &[Integer], options: Vec<Integer>) -> Result<Integer> {
        let n0 = scaled_start(&self.rule).expect("scaled rule");
        let n = n0 + prefix.len() as u64;
        let target = scale_range(prefix, n0)?.midpoint() * n_pow_n(n);
        Ok(options
            .into_iter()
            .min_by(|a, b| {
                let da = (Rational::from(a) - &target).abs();
                let db = (Rational::from(b) - &target).abs();
                da.cmp(&db).then_with(|| b.cmp(a))
            })
            .expect("non-empty options"))
    }

    /// One random move: re-pick a prime and regrow by policy, or truncate
    /// and regrow at random.
    fn propose(&mut self, chain: &PrimeChain) -> Result<Option<PrimeChain>> {
        let i = self.rng.gen_range(0..chain.len());
        let prefix = &chain.primes()[..i];
        if self.rng.gen_bool(0.5) {
            let options: Vec<Integer> = self
                .choices(prefix)?
                .into_iter()
                .filter(|p| *p != chain.primes()[i])
                .collect();
            let pick = if options.is_empty() {
                if i > 0 {
                    return Ok(None);
                }
                self.random_start()?
            } else {
                options[self.rng.gen_range(0..options.len())].clone()
            };
            let mut primes = prefix.to_vec();
            primes.push(pick);
            let c = self.chain_of(primes)?;
            Ok(Some(self.grow(c, false)?))
        } else {
            let c = if i == 0 {
                let p = self.random_start()?;
                self.chain_of(vec![p])?
            } else {
                self.chain_of(prefix.to_vec())?
            };
            Ok(Some(self.grow(c, true)?))
        }
    }

    fn run(&mut self, restart: u32) -> Result<RestartOutcome> {
        let lambda = self.config.lambda;
        let first = self.random_start()?;
        let start = self.chain_of(vec![first])?;
        let start = self.grow(start, false)?;
        let mut state = SearchState::new(start, self.config.initial_temperature, lambda);
        let (mut moves, mut accepted) = (0u64, 0u64);
        let mut best_lengths = Vec::new();
        let stop = 'schedule: loop {
            if state.temperature < self.config.min_temperature {
                break StopReason::ScheduleDone;
            }
            for _ in 0..self.config.steps_per_temperature {
                if state.best_so_far.len() >= self.config.target_length {
                    break 'schedule StopReason::TargetReached;
                }
                if Instant::now() >= self.deadline {
                    break 'schedule StopReason::BudgetExhausted;
                }
                moves += 1;
                let Some(candidate) = self.propose(&state.chain)? else {
                    continue;
                };
                let e = energy(&candidate, lambda);
                let delta = e - state.energy;
                let accept = delta <= 0.0 || self.rng.gen::<f64>() < (-delta / state.temperature).exp();
                if accept {
                    accepted += 1;
                    state.offer(&candidate, lambda);
                    state.chain = candidate;
                    state.energy = e;
                }
            }
            best_lengths.push(state.best_so_far.len());
            state.temperature *= self.config.cooling_factor;
        };
        best_lengths.push(state.best_so_far.len());
        Ok(RestartOutcome {
            restart,
            best: state.best_so_far,
            stop,
            moves,
            accepted,
            best_lengths,
        })
    }
}

fn n_pow_n(n: u64) -> Integer {
    Integer::from(Integer::u_pow_u(n as u32, n as u32))
}

fn scale_range(prefix: &[Integer], n0: u64) -> Result<ScaleRange> {
    crate::chains::recover_scale_constant(prefix, n0)
}

/// Per-restart generator seed, spread so nearby seeds give unrelated streams.
fn restart_seed(seed: u64, restart: u32) -> u64 {
    let mut z = seed ^ (u64::from(restart) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Engine {
    /// Anneals over chains of the rule, which must be a rational power or
    /// the scaled `n^n` rule. Deterministic for a given seed unless the time
    /// budget cuts a restart short.
    pub fn anneal_chain(&self, rule: &GrowthRule, config: &SearchConfig) -> Result<SearchOutcome> {
        config.check()?;
        if !matches!(rule, GrowthRule::Power { .. } | GrowthRule::ScaledNn { .. }) {
            return Err(ChainError::Unsupported(format!("annealing supports power and nn rules, not {rule}")));
        }
        let deadline = Instant::now() + Duration::from_secs_f64(config.time_budget);
        let restarts: Vec<RestartOutcome> = (0..config.restart_count)
            .into_par_iter()
            .map(|r| {
                Walker {
                    engine: self,
                    rule: *rule,
                    config,
                    rng: ChaCha8Rng::seed_from_u64(restart_seed(config.rng_seed, r)),
                    deadline,
                }
                .run(r)
            })
            .collect::<Result<_>>()?;
        let winner = restarts
            .iter()
            .min_by(|a, b| better(&a.best, &b.best, config.lambda).then(a.restart.cmp(&b.restart)))
            .expect("at least one restart");
        let stop = if restarts.iter().any(|r| r.stop == StopReason::TargetReached) {
            StopReason::TargetReached
        } else if restarts.iter().any(|r| r.stop == StopReason::BudgetExhausted) {
            StopReason::BudgetExhausted
        } else {
            StopReason::ScheduleDone
        };
        let best = self.attach_seed(winner.best.clone());
        Ok(SearchOutcome {
            energy: energy(&best, config.lambda),
            best,
            stop,
            restarts,
        })
    }

    fn attach_seed(&self, chain: PrimeChain) -> PrimeChain {
        let digits = match scaled_start(&chain.rule()) {
            Some(n0) => scale_range(chain.primes(), n0).ok().and_then(|r| {
                let bits = 64 + 4 * r.hi().denom().significant_bits();
                let x = r.to_interval(bits).ok()?;
                let frac = x.certain_frac_digits(u32::MAX / 8) + 4;
                Some(format_fixed(&x.midpoint(), frac))
            }),
            None => self.recover_seed(&chain).ok().map(|s| s.digits),
        };
        match digits {
            Some(d) => chain.with_seed(d),
            None => chain,
        }
    }

    /// Extends from `start_prime` with the nearest policy until a step has
    /// no prime or `max_steps` primes were appended.
    pub fn greedy_extend(&self, rule: &GrowthRule, start_prime: &Integer, max_steps: usize) -> Result<GreedyOutcome> {
        if !self.tester.is_prime(start_prime) {
            return Err(ChainError::Invalid(format!("{start_prime} is not a probable prime")));
        }
        let start = PrimeChain::new(*rule, Policy::Nearest, offset_for(rule), vec![start_prime.clone()])?;
        if let Some(n0) = scaled_start(rule) {
            let config = SearchConfig {
                target_length: max_steps + 1,
                start_lo: start_prime.clone(),
                start_hi: start_prime.clone(),
                ..SearchConfig::default()
            };
            let mut walker = Walker {
                engine: self,
                rule: *rule,
                config: &config,
                rng: ChaCha8Rng::seed_from_u64(0),
                deadline: Instant::now(),
            };
            let chain = walker.grow(start, false)?;
            let stop = if chain.len() > max_steps {
                GreedyStop::MaxSteps
            } else {
                let n = n0 + chain.len() as u64;
                GreedyStop::Infeasible {
                    step: n,
                    window: scale_range(chain.primes(), n0)?.window(n),
                }
            };
            return Ok(GreedyOutcome { chain, stop });
        }
        let (chain, stop) = self.extend_until(&start, max_steps)?;
        let stop = match stop {
            None => GreedyStop::MaxSteps,
            Some(ChainError::Infeasible { step, window }) => GreedyStop::Infeasible { step, window },
            Some(e) => return Err(e),
        };
        Ok(GreedyOutcome { chain, stop })
    }
}

/// `anneal_chain` under the default engine.
pub fn anneal_chain(rule: &GrowthRule, config: &SearchConfig) -> Result<SearchOutcome> {
    Engine::default().anneal_chain(rule, config)
}

/// `greedy_extend` under the default engine.
pub fn greedy_extend(rule: &GrowthRule, start_prime: &Integer, max_steps: usize) -> Result<GreedyOutcome> {
    Engine::default().greedy_extend(rule, start_prime, max_steps)
}
