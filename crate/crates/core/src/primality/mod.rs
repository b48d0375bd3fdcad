//! Probable-prime testing and directed prime search over arbitrary-size
//! integers.
//!
//! Values below `2^64` are decided exactly by a deterministic strong test;
//! above that the battery is trial division, Baillie–PSW and a configurable
//! number of extra strong rounds whose bases are derived from `n` itself,
//! so every verdict is reproducible.

mod bpsw;
mod search;
pub mod sieve;
mod small;

pub use search::{
    first_prime_in_window, last_prime_in_window, nearest_prime, next_prime, prev_prime,
    primes_in_window,
};
pub use small::{is_prime_u64, primes_below, small_primes, SMALL_PRIME_LIMIT};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Default number of random-base strong rounds after Baillie–PSW.
pub const DEFAULT_EXTRA_ROUNDS: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrimalityError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("precision error: {0}")]
    Precision(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PrimeStatus {
    ProvenPrime,
    ProbablePrime,
    Composite,
    Unknown,
}

impl PrimeStatus {
    /// Prime or probable prime.
    pub fn is_prime_like(self) -> bool {
        matches!(self, PrimeStatus::ProvenPrime | PrimeStatus::ProbablePrime)
    }
}

impl fmt::Display for PrimeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrimeStatus::ProvenPrime => "PROVEN_PRIME",
            PrimeStatus::ProbablePrime => "PROBABLE_PRIME",
            PrimeStatus::Composite => "COMPOSITE",
            PrimeStatus::Unknown => "UNKNOWN",
        })
    }
}

/// A test that contributed to a verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TestKind {
    TrialDivision { bound: u32 },
    Deterministic64,
    StrongBase(Integer),
    StrongLucas { d: i64 },
}

/// Reproducible evidence of compositeness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// 0 and 1 are not prime.
    BelowTwo,
    Factor(Integer),
    /// `n` fails the strong test to this base.
    StrongBase(Integer),
    /// `n` fails the strong Lucas test with Selfridge parameter `D`.
    Lucas { d: i64 },
    PerfectSquare,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::BelowTwo => write!(f, "below 2"),
            Witness::Factor(p) => write!(f, "divisible by {p}"),
            Witness::StrongBase(a) => write!(f, "fails strong test to base {a}"),
            Witness::Lucas { d } => write!(f, "fails strong Lucas test with D = {d}"),
            Witness::PerfectSquare => write!(f, "perfect square"),
        }
    }
}

/// An integer together with its primality verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeCandidate {
    pub value: Integer,
    pub status: PrimeStatus,
    pub tests_run: Vec<TestKind>,
    /// Present exactly when `status` is `Composite`.
    pub witness: Option<Witness>,
}

impl PrimeCandidate {
    pub fn is_prime_like(&self) -> bool {
        self.status.is_prime_like()
    }

    fn composite(value: Integer, tests_run: Vec<TestKind>, witness: Witness) -> PrimeCandidate {
        PrimeCandidate {
            value,
            status: PrimeStatus::Composite,
            tests_run,
            witness: Some(witness),
        }
    }
}

/// Half-open integer window `[lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SearchWindow {
    lo: Integer,
    hi: Integer,
}

impl SearchWindow {
    pub fn new(lo: Integer, hi: Integer) -> Result<SearchWindow, PrimalityError> {
        if lo >= hi {
            return Err(PrimalityError::Domain("search window needs lo < hi"));
        }
        if lo < 0 {
            return Err(PrimalityError::Domain("search window must be non-negative"));
        }
        Ok(SearchWindow { lo, hi })
    }

    /// The inclusive range `[first, last]`, or `None` when it is empty.
    pub fn inclusive(first: Integer, last: Integer) -> Option<SearchWindow> {
        let hi = last + 1u32;
        SearchWindow::new(first, hi).ok()
    }

    pub fn lo(&self) -> &Integer {
        &self.lo
    }

    pub fn hi(&self) -> &Integer {
        &self.hi
    }

    /// Last member (`hi - 1`).
    pub fn last(&self) -> Integer {
        Integer::from(&self.hi - 1u32)
    }

    pub fn len(&self) -> Integer {
        Integer::from(&self.hi - &self.lo)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: &Integer) -> bool {
        self.lo <= *n && *n < self.hi
    }
}

impl fmt::Display for SearchWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

/// Configured primality battery.
#[derive(Clone, Debug)]
pub struct PrimeTester {
    extra_rounds: u32,
    sieve_primes: Arc<Vec<u32>>,
}

impl Default for PrimeTester {
    fn default() -> PrimeTester {
        PrimeTester::new(DEFAULT_EXTRA_ROUNDS)
    }
}

impl PrimeTester {
    pub fn new(extra_rounds: u32) -> PrimeTester {
        PrimeTester {
            extra_rounds,
            sieve_primes: Arc::new(small_primes().to_vec()),
        }
    }

    /// Sieve windows by every prime below `limit` (trial division still
    /// uses the fixed small table).
    pub fn with_sieve_limit(mut self, limit: u32) -> PrimeTester {
        self.sieve_primes = Arc::new(primes_below(limit.max(SMALL_PRIME_LIMIT)));
        self
    }

    pub fn extra_rounds(&self) -> u32 {
        self.extra_rounds
    }

    pub(crate) fn sieve_primes(&self) -> &[u32] {
        &self.sieve_primes
    }

    /// Full battery; see the module docs.
    pub fn test(&self, n: &Integer) -> PrimeCandidate {
        is_probable_prime(n, self.extra_rounds)
    }

    pub fn is_prime(&self, n: &Integer) -> bool {
        self.test(n).is_prime_like()
    }
}

/// Runs the probable-prime battery on `n`.
pub fn is_probable_prime(n: &Integer, extra_rounds: u32) -> PrimeCandidate {
    let value = n.clone();
    if *n < 2 {
        return PrimeCandidate::composite(value, Vec::new(), Witness::BelowTwo);
    }
    let mut tests = vec![TestKind::TrialDivision {
        bound: SMALL_PRIME_LIMIT,
    }];
    for &p in small_primes() {
        if n.is_divisible_u(p) {
            if *n == p {
                return PrimeCandidate {
                    value,
                    status: PrimeStatus::ProvenPrime,
                    tests_run: tests,
                    witness: None,
                };
            }
            return PrimeCandidate::composite(value, tests, Witness::Factor(Integer::from(p)));
        }
    }
    let limit = u64::from(SMALL_PRIME_LIMIT);
    if let Some(small) = n.to_u64() {
        if small < limit * limit {
            return PrimeCandidate {
                value,
                status: PrimeStatus::ProvenPrime,
                tests_run: tests,
                witness: None,
            };
        }
        tests.push(TestKind::Deterministic64);
        return match small::u64_composite_witness(small) {
            None => PrimeCandidate {
                value,
                status: PrimeStatus::ProvenPrime,
                tests_run: tests,
                witness: None,
            },
            Some(a) => PrimeCandidate::composite(value, tests, Witness::StrongBase(Integer::from(a))),
        };
    }
    if let Err(w) = baillie_psw_after_trial(n, &mut tests) {
        return PrimeCandidate::composite(value, tests, w);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(n.to_u64_wrapping() ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..extra_rounds {
        let base = Integer::from(rng.gen_range(3..u64::MAX));
        tests.push(TestKind::StrongBase(base.clone()));
        if !bpsw::strong_probable_prime(n, &base) {
            return PrimeCandidate::composite(value, tests, Witness::StrongBase(base));
        }
    }
    PrimeCandidate {
        value,
        status: PrimeStatus::ProbablePrime,
        tests_run: tests,
        witness: None,
    }
}

fn baillie_psw_after_trial(n: &Integer, tests: &mut Vec<TestKind>) -> Result<(), Witness> {
    let two = Integer::from(2);
    tests.push(TestKind::StrongBase(two.clone()));
    if !bpsw::strong_probable_prime(n, &two) {
        return Err(Witness::StrongBase(two));
    }
    match bpsw::strong_lucas(n) {
        Ok(d) => {
            tests.push(TestKind::StrongLucas { d });
            Ok(())
        }
        Err(bpsw::LucasFailure::Square) => Err(Witness::PerfectSquare),
        Err(bpsw::LucasFailure::Factor(f)) => Err(Witness::Factor(f)),
        Err(bpsw::LucasFailure::Sequence { d }) => {
            tests.push(TestKind::StrongLucas { d });
            Err(Witness::Lucas { d })
        }
    }
}

/// The bare Baillie–PSW battery (no trial division shortcut, no extra
/// rounds). Defined for every `n`; small cases are answered directly.
pub fn baillie_psw(n: &Integer) -> Result<(), Witness> {
    if *n < 2 {
        return Err(Witness::BelowTwo);
    }
    for p in [2u32, 3, 5, 7] {
        if n.is_divisible_u(p) {
            return if *n == p {
                Ok(())
            } else {
                Err(Witness::Factor(Integer::from(p)))
            };
        }
    }
    baillie_psw_after_trial(n, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_and_witnesses() {
        let c = is_probable_prime(&Integer::from(6_084_503_671u64), 2);
        assert_eq!(c.status, PrimeStatus::ProvenPrime);
        let ten64: Integer = Integer::from(Integer::u_pow_u(10, 64)) + 56u32;
        let c = is_probable_prime(&ten64, 2);
        assert_eq!(c.status, PrimeStatus::Composite);
        assert_eq!(c.witness, Some(Witness::Factor(Integer::from(2))));
        let c = is_probable_prime(&Integer::from(1), 2);
        assert_eq!(c.witness, Some(Witness::BelowTwo));
        let c = is_probable_prime(&Integer::from(561), 2);
        assert_eq!(c.witness, Some(Witness::Factor(Integer::from(3))));
    }

    #[test]
    fn large_primes_are_probable_not_proven() {
        // 2^127 - 1
        let m127 = (Integer::from(1) << 127u32) - 1u32;
        let c = is_probable_prime(&m127, 2);
        assert_eq!(c.status, PrimeStatus::ProbablePrime);
        assert!(c.tests_run.len() >= 5);
        let composite = Integer::from(&m127 * 170_141_183_460_469_231_731_687_303_715_884_105_727u128);
        let c = is_probable_prime(&composite, 2);
        assert_eq!(c.status, PrimeStatus::Composite);
        assert!(matches!(c.witness, Some(Witness::StrongBase(_))));
    }

    #[test]
    fn verdicts_are_reproducible() {
        let n = (Integer::from(1) << 89u32) - 1u32;
        assert_eq!(is_probable_prime(&n, 4), is_probable_prime(&n, 4));
    }

    #[test]
    fn bare_bpsw_small_cases() {
        assert!(baillie_psw(&Integer::from(2)).is_ok());
        assert!(baillie_psw(&Integer::from(97)).is_ok());
        assert!(baillie_psw(&Integer::from(91)).is_err());
        assert!(baillie_psw(&Integer::from(0)).is_err());
    }

    #[test]
    fn windows_validate() {
        assert!(SearchWindow::new(Integer::from(5), Integer::from(5)).is_err());
        let w = SearchWindow::inclusive(Integer::from(2), Integer::from(3)).unwrap();
        assert_eq!(*w.hi(), 4);
        assert!(SearchWindow::inclusive(Integer::from(4), Integer::from(3)).is_none());
    }
}
