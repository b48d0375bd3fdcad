//! Prime chains: forward extension inside feasible windows, seed generation
//! and verification, and backward seed recovery.
//!
//! A chain under rule `f` is a list of primes `s(i)` that are the rounded
//! values `R(a(i))` of a real orbit `a(i+1) = f(a(i))`. The orbit index of
//! the first prime is the chain's `offset`.

mod classic;
mod engine;
mod generate;
mod live;
mod recover;
mod scaled;

pub use classic::{mills_rule, regenerate_mills, regenerate_wright, verify_mills, verify_wright, WRIGHT_MAX_TERMS};
pub use engine::{Engine, FeasibilityReport};
pub use generate::{generate_from_seed, Generation, SeedSource, Term};
pub use recover::{recover_seed, recover_seed_indexed, RecoveredSeed};
pub use scaled::{recover_scale_constant, scan_scaled_nn, ScaleRange};

use crate::bigreal::{BigRealError, Dyadic, RationalExponent};
use crate::primality::{PrimalityError, SearchWindow};
use rug::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    /// No probable prime lies in the window reachable from level `step - 1`.
    #[error("infeasible at step {step}: no probable prime in {}", window_text(.window))]
    Infeasible {
        step: u64,
        window: Option<SearchWindow>,
    },
    /// No seed produces the given primes.
    #[error("empty intersection at index {index}: no seed rounds to every listed prime")]
    EmptyIntersection { index: u64 },
    /// The seed's known digits cannot decide the term at this index.
    #[error("precision exhausted at step {step}")]
    PrecisionExhausted { step: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid chain: {0}")]
    Invalid(String),
    #[error("resource guard tripped: {0}")]
    Resource(String),
    #[error(transparent)]
    Real(#[from] BigRealError),
    #[error(transparent)]
    Primality(#[from] PrimalityError),
}

fn window_text(w: &Option<SearchWindow>) -> String {
    match w {
        Some(w) => w.to_string(),
        None => "an empty window".to_string(),
    }
}

pub type Result<T> = std::result::Result<T, ChainError>;

/// How a real iterate is turned into an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rounding {
    /// Nearest integer, halves upward: `m` covers `[m - 1/2, m + 1/2)`.
    Nearest,
    /// `m` covers `[m, m + 1)`.
    Floor,
}

impl Rounding {
    /// Lower end of the reals that round to `m`.
    pub fn strip_lo(self, m: &Integer) -> Dyadic {
        match self {
            Rounding::Nearest => Dyadic::half_of(Integer::from(2 * m) - 1u32),
            Rounding::Floor => Dyadic::from(m),
        }
    }

    /// Upper (excluded) end of the reals that round to `m`.
    pub fn strip_hi(self, m: &Integer) -> Dyadic {
        match self {
            Rounding::Nearest => Dyadic::half_of(Integer::from(2 * m) + 1u32),
            Rounding::Floor => Dyadic::from_integer(Integer::from(m + 1u32)),
        }
    }

    /// The strip offset `d` with `m` covering `[m - d, m - d + 1)`.
    pub(crate) fn offset(self) -> Dyadic {
        match self {
            Rounding::Nearest => Dyadic::half_of(Integer::from(1)),
            Rounding::Floor => Dyadic::zero(),
        }
    }
}

impl fmt::Display for Rounding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rounding::Nearest => "nearest",
            Rounding::Floor => "floor",
        })
    }
}

impl FromStr for Rounding {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Rounding> {
        match s.to_ascii_lowercase().as_str() {
            "nearest" | "round" => Ok(Rounding::Nearest),
            "floor" => Ok(Rounding::Floor),
            _ => Err(ChainError::Invalid(format!("unknown rounding {s:?}"))),
        }
    }
}

/// Which prime of a feasible window extends a chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Policy {
    /// Prime closest to the image of the head; ties go up.
    #[default]
    Nearest,
    /// Smallest prime at or above the image of the head, else the largest
    /// prime below it.
    NextAbove,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Nearest => "nearest",
            Policy::NextAbove => "next-above",
        })
    }
}

impl FromStr for Policy {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Policy> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "nearest" => Ok(Policy::Nearest),
            "next-above" | "next" => Ok(Policy::NextAbove),
            _ => Err(ChainError::Invalid(format!("unknown policy {s:?}"))),
        }
    }
}

/// The map `a(n) -> a(n+1)` and how iterates become integers.
///
/// Textual form: `power:5/4:nearest`, `power:3:floor`, `exp2`, `shift:10`,
/// `nn:3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum GrowthRule {
    Power {
        exponent: RationalExponent,
        rounding: Rounding,
    },
    /// `a(n+1) = 2^a(n)`, floored.
    Exp2Tower,
    /// `a(n+1) = base * a(n)`, rounded to nearest.
    DigitShift { base: u32 },
    /// `a(n) = floor(c * n^n)` for `n >= range_start`.
    ScaledNn { range_start: u64 },
}

impl GrowthRule {
    pub fn power(exponent: RationalExponent, rounding: Rounding) -> Result<GrowthRule> {
        if exponent.is_identity() {
            return Err(ChainError::Invalid("power rule needs an exponent above 1".into()));
        }
        Ok(GrowthRule::Power { exponent, rounding })
    }

    pub fn digit_shift(base: u32) -> Result<GrowthRule> {
        if base < 2 {
            return Err(ChainError::Invalid("digit shift needs base >= 2".into()));
        }
        Ok(GrowthRule::DigitShift { base })
    }

    pub fn scaled_nn(range_start: u64) -> Result<GrowthRule> {
        if range_start < 1 {
            return Err(ChainError::Invalid("scaled n^n rule needs range_start >= 1".into()));
        }
        Ok(GrowthRule::ScaledNn { range_start })
    }

    /// Orbit index of the first emitted term.
    pub fn first_index(&self) -> u64 {
        match self {
            GrowthRule::Power { .. } => 0,
            GrowthRule::Exp2Tower | GrowthRule::DigitShift { .. } => 1,
            GrowthRule::ScaledNn { range_start } => *range_start,
        }
    }

    pub fn rounding(&self) -> Rounding {
        match self {
            GrowthRule::Power { rounding, .. } => *rounding,
            GrowthRule::DigitShift { .. } => Rounding::Nearest,
            GrowthRule::Exp2Tower | GrowthRule::ScaledNn { .. } => Rounding::Floor,
        }
    }

    pub fn exponent(&self) -> Option<RationalExponent> {
        match self {
            GrowthRule::Power { exponent, .. } => Some(*exponent),
            _ => None,
        }
    }

    /// Rough `log2 a(n+1)` from `log2 a(n)`, for precision planning.
    pub(crate) fn grow_log2(&self, log2: f64) -> f64 {
        match self {
            GrowthRule::Power { exponent, .. } => log2 * exponent.to_f64(),
            GrowthRule::DigitShift { base } => log2 + f64::from(*base).log2(),
            GrowthRule::Exp2Tower => 2f64.powf(log2),
            GrowthRule::ScaledNn { .. } => log2,
        }
    }
}

impl fmt::Display for GrowthRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthRule::Power { exponent, rounding } => {
                if exponent.den() == 1 {
                    write!(f, "power:{}:{rounding}", exponent.num())
                } else {
                    write!(f, "power:{exponent}:{rounding}")
                }
            }
            GrowthRule::Exp2Tower => f.write_str("exp2"),
            GrowthRule::DigitShift { base } => write!(f, "shift:{base}"),
            GrowthRule::ScaledNn { range_start } => write!(f, "nn:{range_start}"),
        }
    }
}

impl FromStr for GrowthRule {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<GrowthRule> {
        let bad = |why: &str| ChainError::Invalid(format!("rule {s:?}: {why}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["power", e] | ["power", e, _] => {
                let exponent: RationalExponent = e.parse().map_err(|_| bad("bad exponent"))?;
                let rounding = match parts.get(2) {
                    Some(r) => r.parse()?,
                    None => Rounding::Nearest,
                };
                GrowthRule::power(exponent, rounding)
            }
            ["exp2"] => Ok(GrowthRule::Exp2Tower),
            ["shift", b] => GrowthRule::digit_shift(b.parse().map_err(|_| bad("bad base"))?),
            ["nn", n] => GrowthRule::scaled_nn(n.parse().map_err(|_| bad("bad start"))?),
            _ => Err(bad("expected power:E[:ROUNDING], exp2, shift:B or nn:N")),
        }
    }
}

impl From<GrowthRule> for String {
    fn from(r: GrowthRule) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for GrowthRule {
    type Error = ChainError;

    fn try_from(s: String) -> Result<GrowthRule> {
        s.parse()
    }
}

/// An immutable run of primes under a growth rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeChain {
    rule: GrowthRule,
    policy: Policy,
    offset: u64,
    primes: Vec<Integer>,
    seed: Option<String>,
}

impl PrimeChain {
    /// Checks shape only (non-empty, strictly increasing, at least 2);
    /// primality is checked by [`Engine::validate`].
    pub fn new(rule: GrowthRule, policy: Policy, offset: u64, primes: Vec<Integer>) -> Result<PrimeChain> {
        if primes.is_empty() {
            return Err(ChainError::Invalid("a chain needs at least one prime".into()));
        }
        if primes[0] < 2 {
            return Err(ChainError::Invalid("chain elements must be at least 2".into()));
        }
        if let Some(w) = primes.windows(2).find(|w| w[0] >= w[1]) {
            return Err(ChainError::Invalid(format!(
                "chain must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(PrimeChain {
            rule,
            policy,
            offset,
            primes,
            seed: None,
        })
    }

    /// One-element chain at the rule's first index.
    pub fn start(rule: GrowthRule, policy: Policy, prime: Integer) -> Result<PrimeChain> {
        PrimeChain::new(rule, policy, rule.first_index(), vec![prime])
    }

    /// Attaches the decimal digits of a seed that reproduces the chain.
    pub fn with_seed(mut self, digits: String) -> PrimeChain {
        self.seed = Some(digits);
        self
    }

    pub fn rule(&self) -> GrowthRule {
        self.rule
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn primes(&self) -> &[Integer] {
        &self.primes
    }

    pub fn seed(&self) -> Option<&str> {
        self.seed.as_deref()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn head(&self) -> &Integer {
        self.primes.last().expect("chains are non-empty")
    }

    /// `(orbit index, prime)` pairs.
    pub fn indexed(&self) -> Vec<(u64, Integer)> {
        self.primes
            .iter()
            .enumerate()
            .map(|(i, p)| (self.offset + i as u64, p.clone()))
            .collect()
    }

    /// The first `len` primes.
    pub fn prefix(&self, len: usize) -> Result<PrimeChain> {
        PrimeChain::new(self.rule, self.policy, self.offset, self.primes[..len.min(self.len())].to_vec())
    }

    pub(crate) fn pushed(&self, p: Integer) -> PrimeChain {
        let mut primes = self.primes.clone();
        primes.push(p);
        PrimeChain {
            rule: self.rule,
            policy: self.policy,
            offset: self.offset,
            primes,
            seed: None,
        }
    }
}

/// `feasible_window` under the default engine.
pub fn feasible_window(s: &Integer, e: RationalExponent, rounding: Rounding) -> Result<SearchWindow> {
    Engine::default().feasible_window(s, e, rounding)
}

/// `extend_chain` under the default engine.
pub fn extend_chain(chain: &PrimeChain, steps: usize) -> Result<PrimeChain> {
    Engine::default().extend_chain(chain, steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_syntax_roundtrips() {
        for text in ["power:5/4:nearest", "power:3:floor", "exp2", "shift:10", "nn:3"] {
            let r: GrowthRule = text.parse().unwrap();
            assert_eq!(r.to_string(), text);
        }
        assert_eq!(
            "power:3/2".parse::<GrowthRule>().unwrap().to_string(),
            "power:3/2:nearest"
        );
        assert!("power:1".parse::<GrowthRule>().is_err());
        assert!("shift:1".parse::<GrowthRule>().is_err());
        assert!("nn:0".parse::<GrowthRule>().is_err());
        assert!("cube".parse::<GrowthRule>().is_err());
    }

    #[test]
    fn rule_serializes_as_text() {
        let r: GrowthRule = "power:11/10:nearest".parse().unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, "\"power:11/10:nearest\"");
        assert_eq!(serde_json::from_str::<GrowthRule>(&json).unwrap(), r);
        assert_eq!(serde_json::to_string(&Policy::NextAbove).unwrap(), "\"NEXT_ABOVE\"");
    }

    #[test]
    fn chain_shape_is_checked() {
        let rule: GrowthRule = "power:3/2".parse().unwrap();
        let p = |v: &[u32]| v.iter().map(|&x| Integer::from(x)).collect::<Vec<_>>();
        assert!(PrimeChain::new(rule, Policy::Nearest, 0, p(&[2, 3, 5])).is_ok());
        assert!(PrimeChain::new(rule, Policy::Nearest, 0, p(&[3, 3])).is_err());
        assert!(PrimeChain::new(rule, Policy::Nearest, 0, p(&[])).is_err());
        assert!(PrimeChain::new(rule, Policy::Nearest, 0, p(&[1, 2])).is_err());
    }

    #[test]
    fn strips() {
        let m = Integer::from(5);
        assert_eq!(Rounding::Nearest.strip_lo(&m), Dyadic::half_of(Integer::from(9)));
        assert_eq!(Rounding::Nearest.strip_hi(&m), Dyadic::half_of(Integer::from(11)));
        assert_eq!(Rounding::Floor.strip_hi(&m), Dyadic::from(6));
    }
}
