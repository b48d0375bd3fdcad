//! Mills' and Wright's prime-representing constants.

use super::generate::{Generation, SeedSource};
use super::{ChainError, Engine, GrowthRule, Policy, PrimeChain, Result, Rounding};
use crate::bigreal::RationalExponent;
use crate::constants::WRIGHT_ALPHA;
use crate::primality::PrimeTester;
use rug::Integer;

/// Terms of Wright's tower reachable at desk scale; the fifth has about
/// `10^4931` digits.
pub const WRIGHT_MAX_TERMS: u64 = 4;

/// Sieve bound for the 4932-digit search above `2^16381`.
const WRIGHT_SIEVE_LIMIT: u32 = 1 << 22;

/// `a(n+1) = a(n)^3` with floor rounding; `a(0)` is Mills' constant.
pub fn mills_rule() -> GrowthRule {
    GrowthRule::Power {
        exponent: RationalExponent::new(3, 1).expect("3 > 1"),
        rounding: Rounding::Floor,
    }
}

impl Engine {
    /// `floor(A^(3^n))` for `n = 1 ..= count`.
    pub fn verify_mills(&self, a: &SeedSource, count: u64) -> Result<Generation> {
        check_count(count)?;
        self.generate_from_index(a, &mills_rule(), 1, count)
    }

    /// `s(1) = 2`, `s(n+1)` the least prime above `s(n)^3`.
    pub fn regenerate_mills(&self, count: u64) -> Result<PrimeChain> {
        check_count(count)?;
        let start = PrimeChain::new(mills_rule(), Policy::NextAbove, 1, vec![Integer::from(2)])?;
        self.extend_chain(&start, (count - 1) as usize)
    }

    /// `floor(g(n))` for `n = 1 ..= count`, where `g(0) = alpha` and
    /// `g(n+1) = 2^g(n)`.
    pub fn verify_wright(&self, alpha: &SeedSource, count: u64) -> Result<Generation> {
        check_count(count)?;
        self.generate_from_index(alpha, &GrowthRule::Exp2Tower, 1, count)
    }

    /// The terms the published digits of `alpha` decide, continued by the
    /// least prime above `2^s` inside the reachable window.
    pub fn regenerate_wright(&self, count: u64) -> Result<PrimeChain> {
        check_count(count)?;
        if count > WRIGHT_MAX_TERMS {
            return Err(ChainError::Resource(format!(
                "Wright's tower beyond {WRIGHT_MAX_TERMS} terms is out of reach"
            )));
        }
        let alpha = SeedSource::decimal(WRIGHT_ALPHA)?;
        let decided = self.verify_wright(&alpha, count)?;
        let chain = PrimeChain::new(GrowthRule::Exp2Tower, Policy::NextAbove, 1, decided.values())?;
        let missing = count as usize - chain.len();
        self.extend_chain(&chain, missing)
    }
}

fn check_count(count: u64) -> Result<()> {
    if count == 0 {
        return Err(ChainError::Invalid("count must be at least 1".into()));
    }
    Ok(())
}

pub fn verify_mills(a: &SeedSource, count: u64) -> Result<Generation> {
    Engine::default().verify_mills(a, count)
}

pub fn regenerate_mills(count: u64) -> Result<PrimeChain> {
    Engine::default().regenerate_mills(count)
}

pub fn verify_wright(alpha: &SeedSource, count: u64) -> Result<Generation> {
    Engine::default().verify_wright(alpha, count)
}

/// `regenerate_wright` with a sieve deep enough for the fourth term.
pub fn regenerate_wright(count: u64) -> Result<PrimeChain> {
    let engine = Engine {
        tester: PrimeTester::default().with_sieve_limit(WRIGHT_SIEVE_LIMIT),
        ..Engine::default()
    };
    engine.regenerate_wright(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::MILLS_A;

    fn ints(v: &[u64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn mills_terms() {
        let a = SeedSource::decimal(MILLS_A).unwrap();
        let g = verify_mills(&a, 2).unwrap();
        assert_eq!(g.values(), ints(&[2, 11]));
        assert_eq!(regenerate_mills(3).unwrap().primes(), ints(&[2, 11, 1361]));
        assert_eq!(regenerate_mills(1).unwrap().primes(), ints(&[2]));
        assert!(regenerate_mills(0).is_err());
    }

    #[test]
    fn wright_terms() {
        let alpha = SeedSource::decimal(WRIGHT_ALPHA).unwrap();
        let g = verify_wright(&alpha, 4).unwrap();
        assert_eq!(g.values(), ints(&[3, 13, 16381]));
        assert_eq!(g.exhausted_at, Some(4));
        assert_eq!(regenerate_wright(3).unwrap().primes(), ints(&[3, 13, 16381]));
        assert_eq!(regenerate_wright(1).unwrap().primes(), ints(&[3]));
        assert!(matches!(regenerate_wright(5), Err(ChainError::Resource(_))));
    }
}
