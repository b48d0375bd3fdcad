//! The rule `a(n) = floor(c * n^n)`: scanning a constant and recovering
//! the constants that reproduce a list of values. Live sets are exact
//! rational intervals.

use super::generate::{Generation, SeedSource, Term};
use super::live::bits_for;
use super::{ChainError, Engine, GrowthRule, Result};
use crate::bigreal::{Decision, RealInterval};
use crate::primality::SearchWindow;
use rug::ops::Pow;
use rug::{Integer, Rational};

/// Half-open interval `[lo, hi)` of scale constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleRange {
    lo: Rational,
    hi: Rational,
}

fn n_pow_n(n: u64) -> Integer {
    Integer::from(n).pow(u32::try_from(n).expect("index fits in u32"))
}

impl ScaleRange {
    /// Constants `c` with `floor(c * n^n) = p`.
    pub fn of_value(n: u64, p: &Integer) -> ScaleRange {
        let d = n_pow_n(n);
        ScaleRange {
            lo: Rational::from((p.clone(), d.clone())),
            hi: Rational::from((Integer::from(p + 1u32), d)),
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn contains(&self, c: &Rational) -> bool {
        self.lo <= *c && *c < self.hi
    }

    pub fn intersect(&self, other: &ScaleRange) -> Option<ScaleRange> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo < hi).then_some(ScaleRange { lo, hi })
    }

    /// Integers `floor(c * n^n)` over the range.
    pub fn window(&self, n: u64) -> Option<SearchWindow> {
        let d = n_pow_n(n);
        let lo = Rational::from(&self.lo * &d).floor().numer().clone();
        let hi = Rational::from(&self.hi * &d).ceil().numer().clone();
        SearchWindow::new(lo, hi).ok()
    }

    /// Enclosure at the given precision.
    pub fn to_interval(&self, bits: u32) -> Result<RealInterval> {
        let a = RealInterval::from_ratio(self.lo.numer(), self.lo.denom(), bits)?;
        let b = RealInterval::from_ratio(self.hi.numer(), self.hi.denom(), bits)?;
        Ok(a.hull(&b))
    }

    /// Midpoint, as a seed inside the range.
    pub fn midpoint(&self) -> Rational {
        Rational::from(&self.lo + &self.hi) / 2u32
    }
}

/// Constants `c` reproducing `primes` as `floor(c * n^n)` for consecutive
/// `n` from `n_from`.
pub fn recover_scale_constant(primes: &[Integer], n_from: u64) -> Result<ScaleRange> {
    if primes.is_empty() {
        return Err(ChainError::Invalid("recovery needs at least one value".into()));
    }
    if n_from < 1 {
        return Err(ChainError::Invalid("n starts at 1".into()));
    }
    let mut range = ScaleRange::of_value(n_from, &primes[0]);
    for (k, p) in primes.iter().enumerate().skip(1) {
        let n = n_from + k as u64;
        range = range
            .intersect(&ScaleRange::of_value(n, p))
            .ok_or(ChainError::EmptyIntersection { index: n })?;
    }
    Ok(range)
}

impl Engine {
    /// `floor(c * n^n)` with primality for `n = n_from ..= n_to`, stopping
    /// where the digits of `c` run out.
    pub fn scan_scaled_nn(&self, c: &SeedSource, n_from: u64, n_to: u64) -> Result<Generation> {
        if n_from < 1 {
            return Err(ChainError::Invalid("n starts at 1".into()));
        }
        let rule = GrowthRule::ScaledNn { range_start: n_from };
        let mut terms = Vec::new();
        for n in n_from..=n_to {
            let scale = n_pow_n(n);
            let mut bits = bits_for(f64::from(scale.significant_bits()), 64)
                .clamp(self.precision.start_bits, self.precision.max_bits);
            let mut last_width: Option<f64> = None;
            let value = loop {
                let x = c.at_bits(bits)?.mul_integer(&scale);
                if let Decision::Decided(v) = x.floor_of() {
                    break Some(v);
                }
                let w = x.width().log2_approx();
                if last_width.is_some_and(|w0| w > w0 - 2.0) || bits >= self.precision.max_bits {
                    break None;
                }
                last_width = Some(w);
                bits = ((f64::from(bits) * self.precision.growth) as u32).min(self.precision.max_bits);
            };
            let Some(value) = value else {
                return Ok(Generation {
                    rule,
                    terms,
                    exhausted_at: Some(n),
                });
            };
            let status = self.tester.test(&value).status;
            terms.push(Term {
                index: n,
                value,
                status,
            });
        }
        Ok(Generation {
            rule,
            terms,
            exhausted_at: None,
        })
    }
}

/// `scan_scaled_nn` under the default engine.
pub fn scan_scaled_nn(c: &SeedSource, n_from: u64, n_to: u64) -> Result<Generation> {
    Engine::default().scan_scaled_nn(c, n_from, n_to)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_constraint() {
        let r = recover_scale_constant(&[Integer::from(7)], 3).unwrap();
        assert_eq!(*r.lo(), Rational::from((7, 27)));
        assert_eq!(*r.hi(), Rational::from((8, 27)));
    }

    #[test]
    fn contradictory_values() {
        // c in [7/27, 8/27) puts floor(256 c) in [66, 75].
        let err = recover_scale_constant(&[Integer::from(7), Integer::from(100)], 3).unwrap_err();
        assert_eq!(err, ChainError::EmptyIntersection { index: 4 });
    }

    #[test]
    fn windows() {
        let r = ScaleRange::of_value(3, &Integer::from(7));
        let w = r.window(4).unwrap();
        assert_eq!((w.lo().clone(), w.last()), (Integer::from(66), Integer::from(75)));
    }

    #[test]
    fn short_scan() {
        let c = SeedSource::decimal("0.2655883729431433908971294536654661294389").unwrap();
        let g = scan_scaled_nn(&c, 3, 5).unwrap();
        assert_eq!(g.values(), vec![Integer::from(7), Integer::from(67), Integer::from(829)]);
        let coarse = SeedSource::decimal("0.26558").unwrap();
        let g = scan_scaled_nn(&coarse, 3, 30).unwrap();
        assert!(g.exhausted_at.is_some());
    }
}
