use super::live::{bits_for, step_interval};
use super::{ChainError, Engine, GrowthRule, Result, Rounding};
use crate::bigreal::{clean_decimal_text, BigRealError, Decision, Dyadic, RealInterval};
use crate::primality::PrimeStatus;
use rug::Integer;
use serde::{Deserialize, Serialize};

/// Where a seed's digits come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedSource {
    /// Leading decimal digits of the seed; the true value may be anywhere
    /// in `[x, x + 1 ulp]` of the last digit.
    Decimal(String),
    /// A rigorous enclosure (a point for exactly known seeds).
    Interval(RealInterval),
}

impl SeedSource {
    /// Cleans and validates decimal text (whitespace, line continuations and
    /// a trailing ellipsis are ignored).
    pub fn decimal(text: &str) -> Result<SeedSource> {
        let clean = clean_decimal_text(text);
        RealInterval::parse_decimal_at(&clean, 64)?;
        Ok(SeedSource::Decimal(clean))
    }

    pub(crate) fn at_bits(&self, bits: u32) -> Result<RealInterval> {
        Ok(match self {
            SeedSource::Decimal(text) => RealInterval::parse_decimal_at(text, bits)?,
            SeedSource::Interval(x) => x.with_precision(bits)?,
        })
    }

    fn log2_estimate(&self) -> f64 {
        self.at_bits(64).map_or(0.0, |x| x.hi().log2_approx())
    }

    /// Significant bits the source can supply (unbounded for exact points).
    fn useful_bits(&self) -> Option<u32> {
        match self {
            SeedSource::Decimal(text) => {
                let digits = text.chars().filter(char::is_ascii_digit).count() as f64;
                Some((digits * std::f64::consts::LOG2_10).ceil() as u32 + 64)
            }
            SeedSource::Interval(x) if x.is_point() => None,
            SeedSource::Interval(x) => Some(x.precision_bits()),
        }
    }
}

/// One emitted term of an orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub index: u64,
    #[serde(with = "crate::store::integer_text")]
    pub value: Integer,
    pub status: PrimeStatus,
}

impl Term {
    pub fn digits(&self) -> usize {
        self.value.to_string().trim_start_matches('-').len()
    }
}

/// Terms decided from a seed, and where the seed's digits ran out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generation {
    pub rule: GrowthRule,
    pub terms: Vec<Term>,
    /// Index of the first term the seed could not decide, if the run was
    /// cut short.
    pub exhausted_at: Option<u64>,
}

impl Generation {
    pub fn values(&self) -> Vec<Integer> {
        self.terms.iter().map(|t| t.value.clone()).collect()
    }

    /// The terms, or the precision error when the run was cut short.
    pub fn complete(&self) -> Result<&[Term]> {
        match self.exhausted_at {
            Some(step) => Err(ChainError::PrecisionExhausted { step }),
            None => Ok(&self.terms),
        }
    }

    /// Length of the run of prime-like terms starting at the first term.
    pub fn prime_run(&self) -> usize {
        self.terms.iter().take_while(|t| t.status.is_prime_like()).count()
    }
}

/// Rounds an enclosure per the rule; exact half-integers round up.
pub(crate) fn round_with(rounding: Rounding, x: &RealInterval) -> Decision<Integer> {
    match rounding {
        Rounding::Floor => x.floor_of(),
        Rounding::Nearest => match x.round_nearest() {
            Ok(d) => d,
            Err(BigRealError::ExactTie(twice)) => Decision::Decided((twice + 1u32) >> 1),
            Err(_) => Decision::Undecided,
        },
    }
}

fn width_log2(x: &RealInterval) -> f64 {
    let w = x.width();
    if w.is_zero() {
        f64::NEG_INFINITY
    } else {
        w.log2_approx()
    }
}

impl Engine {
    /// Rounded orbit values at indices `first .. first + count`, without
    /// primality; stops early when the seed cannot decide a term.
    pub(crate) fn round_orbit(
        &self,
        seed: &SeedSource,
        rule: &GrowthRule,
        first: u64,
        count: u64,
    ) -> Result<(Vec<(u64, Integer)>, Option<u64>)> {
        if matches!(rule, GrowthRule::ScaledNn { .. }) {
            return Err(ChainError::Unsupported("use scan_scaled_nn for the scaled n^n rule".into()));
        }
        let rounding = rule.rounding();
        let last = first + count;
        // Plan the precision from the expected size of the last term.
        let mut log2 = seed.log2_estimate();
        let mut need = 0f64;
        for _ in 0..last {
            log2 = rule.grow_log2(log2);
            need = need.max(log2);
        }
        let mut bits = bits_for(need, 64 + 2 * last.min(1 << 20) as u32);
        if let Some(useful) = seed.useful_bits() {
            // Working precision beyond the seed's own is wasted.
            bits = bits.min(useful.saturating_add(64 + 2 * last.min(1 << 20) as u32));
        }
        bits = bits.clamp(self.precision.start_bits, self.precision.max_bits);

        let mut out: Vec<(u64, Integer)> = Vec::new();
        let mut stuck: Option<(u64, f64)> = None;
        loop {
            let mut x = seed.at_bits(bits)?;
            let mut undecided = None;
            for i in 0..last {
                if i >= first && i - first >= out.len() as u64 {
                    match round_with(rounding, &x) {
                        Decision::Decided(m) => out.push((i, m)),
                        Decision::Undecided => {
                            undecided = Some((i, width_log2(&x)));
                            break;
                        }
                    }
                }
                if i + 1 < last {
                    x = match step_interval(rule, &x) {
                        Ok(next) => next,
                        // A tower whose argument exceeds the guard cannot be
                        // enclosed; report the horizon.
                        Err(ChainError::Real(BigRealError::Resource(_))) if i + 1 > first => {
                            return Ok((out, Some(i + 1)));
                        }
                        Err(e) => return Err(e),
                    };
                }
            }
            let Some((k, w)) = undecided else {
                return Ok((out, None));
            };
            if let Some((k0, w0)) = stuck {
                // More bits no longer narrow the enclosure: the seed is spent.
                if k0 == k && w > w0 - 2.0 {
                    return Ok((out, Some(k)));
                }
            }
            if bits >= self.precision.max_bits {
                return Ok((out, Some(k)));
            }
            stuck = Some((k, w));
            bits = ((f64::from(bits) * self.precision.growth) as u32).min(self.precision.max_bits);
        }
    }

    /// Iterates the rule from the seed and emits `count` rounded terms
    /// starting at the rule's first index.
    pub fn generate_from_seed(&self, seed: &SeedSource, rule: &GrowthRule, count: u64) -> Result<Generation> {
        self.generate_from_index(seed, rule, rule.first_index(), count)
    }

    /// As [`generate_from_seed`](Self::generate_from_seed) with an explicit
    /// first orbit index.
    pub fn generate_from_index(
        &self,
        seed: &SeedSource,
        rule: &GrowthRule,
        first: u64,
        count: u64,
    ) -> Result<Generation> {
        if let GrowthRule::ScaledNn { .. } = rule {
            return self.scan_scaled_nn(seed, first, first + count.saturating_sub(1));
        }
        let (values, exhausted_at) = self.round_orbit(seed, rule, first, count)?;
        let terms = values
            .into_iter()
            .map(|(index, value)| {
                let status = self.tester.test(&value).status;
                Term { index, value, status }
            })
            .collect();
        Ok(Generation {
            rule: *rule,
            terms,
            exhausted_at,
        })
    }
}

impl Engine {
    /// First orbit index `n <= max_index` at which some seed in `[lo, hi]`
    /// may round to `value`; only a necessary condition, since the ranges
    /// are enclosures of the whole seed interval.
    pub fn locate_in_orbit(
        &self,
        rule: &GrowthRule,
        lo: &Dyadic,
        hi: &Dyadic,
        value: &Integer,
        max_index: u64,
    ) -> Result<Option<u64>> {
        let bits = bits_for(f64::from(value.significant_bits()), 64 + 4 * max_index.min(1 << 16) as u32)
            .clamp(self.precision.start_bits, self.precision.max_bits);
        let mut a = RealInterval::point(lo.clone(), bits)?;
        let mut b = RealInterval::point(hi.clone(), bits)?;
        for n in 0..=max_index {
            let least = a.lo().floor() - 1u32;
            let most = b.hi().ceil() + 1u32;
            if *value < least {
                return Ok(None);
            }
            if *value <= most {
                return Ok(Some(n));
            }
            a = step_interval(rule, &a)?;
            b = step_interval(rule, &b)?;
        }
        Ok(None)
    }
}

/// `generate_from_seed` under the default engine.
pub fn generate_from_seed(seed: &SeedSource, rule: &GrowthRule, count: u64) -> Result<Generation> {
    Engine::default().generate_from_seed(seed, rule, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[u64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn point_seed_power() {
        let rule: GrowthRule = "power:3/2".parse().unwrap();
        let seed = SeedSource::Interval(RealInterval::from_i64(2, 64).unwrap());
        let g = Engine::default().generate_from_index(&seed, &rule, 1, 1).unwrap();
        assert_eq!(g.values(), ints(&[3]));
        assert_eq!(g.terms[0].index, 1);
        assert_eq!(g.exhausted_at, None);
    }

    #[test]
    fn concatenation_seed() {
        let rule: GrowthRule = "shift:10".parse().unwrap();
        let seed = SeedSource::decimal("7.3327334517988679").unwrap();
        let g = generate_from_seed(&seed, &rule, 5).unwrap();
        assert_eq!(g.values(), ints(&[73, 733, 7333, 73327, 733273]));
        assert!(g.terms.iter().all(|t| t.status.is_prime_like()));
    }

    #[test]
    fn short_decimal_runs_out() {
        let rule: GrowthRule = "shift:10".parse().unwrap();
        let seed = SeedSource::decimal("7.332").unwrap();
        let g = generate_from_seed(&seed, &rule, 6).unwrap();
        // a(3) lies in [7332, 7333], across the midpoint 7332.5.
        assert_eq!(g.values(), ints(&[73, 733]));
        assert_eq!(g.exhausted_at, Some(3));
        assert_eq!(g.complete().unwrap_err(), ChainError::PrecisionExhausted { step: 3 });
    }

    #[test]
    fn exact_ties_round_up() {
        let rule: GrowthRule = "shift:3".parse().unwrap();
        let seed = SeedSource::Interval(RealInterval::point(Dyadic::half_of(Integer::from(5)), 64).unwrap());
        // a(1) = 7.5 rounds to 8.
        let g = generate_from_seed(&seed, &rule, 1).unwrap();
        assert_eq!(g.values(), ints(&[8]));
    }

    #[test]
    fn wright_tower() {
        let seed = SeedSource::decimal("1.9287800").unwrap();
        let g = generate_from_seed(&seed, &GrowthRule::Exp2Tower, 4).unwrap();
        assert_eq!(g.values(), ints(&[3, 13, 16381]));
        assert_eq!(g.exhausted_at, Some(4));
    }

    #[test]
    fn locating_values() {
        let rule: GrowthRule = "power:3/2".parse().unwrap();
        let en = Engine::default();
        let lo = Dyadic::half_of(Integer::from(3));
        let hi = Dyadic::half_of(Integer::from(5));
        // Seeds in [1.5, 2.5] span [7.79, 103.4] at index 4 and
        // [21.7, 1051.6] at index 5.
        assert_eq!(en.locate_in_orbit(&rule, &lo, &hi, &Integer::from(3), 5).unwrap(), Some(0));
        assert_eq!(en.locate_in_orbit(&rule, &lo, &hi, &Integer::from(223), 9).unwrap(), Some(5));
        assert_eq!(en.locate_in_orbit(&rule, &lo, &hi, &Integer::from(223), 2).unwrap(), None);
    }
}
