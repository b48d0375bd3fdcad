use super::generate::SeedSource;
use super::live::{bits_for, unstep_interval};
use super::{ChainError, Engine, GrowthRule, PrimeChain, Result};
use crate::bigreal::{format_fixed, BigRealError, RealInterval};
use rug::Integer;

/// How many precision doublings recovery tries before giving up on
/// certifying an interior seed.
const MAX_ATTEMPTS: u32 = 8;

/// Seeds `a(0)` whose rounded orbit hits every listed prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredSeed {
    /// Encloses every such seed.
    pub enclosure: RealInterval,
    /// Leading digits of a seed: every real that begins with them realizes
    /// the primes, as checked by forward iteration.
    pub digits: String,
}

impl RecoveredSeed {
    /// The recovered digits as a seed for forward generation.
    pub fn source(&self) -> SeedSource {
        SeedSource::Decimal(self.digits.clone())
    }
}

fn check_targets(targets: &[(u64, Integer)]) -> Result<()> {
    if targets.is_empty() {
        return Err(ChainError::Invalid("recovery needs at least one prime".into()));
    }
    if targets.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(ChainError::Invalid("target indices must be strictly increasing".into()));
    }
    if targets.iter().any(|(_, p)| *p < 1) {
        return Err(ChainError::Invalid("targets must be positive".into()));
    }
    Ok(())
}

impl Engine {
    /// Enclosure of the seeds realizing `chain`.
    pub fn recover_seed(&self, chain: &PrimeChain) -> Result<RecoveredSeed> {
        self.recover_seed_indexed(&chain.rule(), &chain.indexed())
    }

    /// Enclosure of the seeds `a(0)` whose rounded orbit equals `p` at each
    /// listed index `(i, p)`; indices in between are unconstrained.
    pub fn recover_seed_indexed(&self, rule: &GrowthRule, targets: &[(u64, Integer)]) -> Result<RecoveredSeed> {
        check_targets(targets)?;
        // Rejects rules without an inverse map.
        unstep_interval(rule, &RealInterval::from_i64(2, 64)?)?;
        let (last, top) = targets.last().expect("non-empty");
        let per_step = match rule {
            GrowthRule::Power { exponent, .. } => exponent.to_f64().log2(),
            GrowthRule::DigitShift { base } => f64::from(*base).log2(),
            _ => 1.0,
        };
        let log2 = f64::from(top.significant_bits()) + per_step * *last as f64;
        let mut bits = bits_for(log2, 64 + 4 * (*last).min(1 << 16) as u32)
            .clamp(self.precision.start_bits, self.precision.max_bits);
        let first = targets[0].0;
        for _ in 0..MAX_ATTEMPTS {
            let enclosure = self.backward(rule, targets, bits)?;
            // Digits a little finer than the enclosure.
            let frac = enclosure.certain_frac_digits(u32::MAX / 8) + 4;
            let digits = format_fixed(&enclosure.midpoint(), frac);
            let source = SeedSource::Decimal(digits.clone());
            let (values, _) = self.round_orbit(&source, rule, first, last - first + 1)?;
            let hits = targets.iter().all(|(i, p)| {
                values
                    .get((i - first) as usize)
                    .is_some_and(|(j, v)| j == i && v == p)
            });
            if hits {
                return Ok(RecoveredSeed { enclosure, digits });
            }
            if bits >= self.precision.max_bits {
                break;
            }
            bits = ((f64::from(bits) * self.precision.growth) as u32).min(self.precision.max_bits);
        }
        Err(ChainError::Real(BigRealError::Precision(format!(
            "no certified seed found up to {bits} bits"
        ))))
    }

    /// Intersects the rounding strips backward from the last target.
    fn backward(&self, rule: &GrowthRule, targets: &[(u64, Integer)], bits: u32) -> Result<RealInterval> {
        let rounding = rule.rounding();
        let strip = |p: &Integer| RealInterval::new(rounding.strip_lo(p), rounding.strip_hi(p), bits);
        let mut rest = targets.iter().rev();
        let (mut index, top) = rest.next().expect("non-empty");
        let mut j = strip(top)?;
        for (i, p) in rest {
            while index > *i {
                j = unstep_interval(rule, &j)?;
                index -= 1;
            }
            j = j
                .intersect(&strip(p)?)
                .ok_or(ChainError::EmptyIntersection { index: *i })?;
        }
        while index > 0 {
            j = unstep_interval(rule, &j)?;
            index -= 1;
        }
        Ok(j)
    }
}

/// `recover_seed` under the default engine.
pub fn recover_seed(chain: &PrimeChain) -> Result<RecoveredSeed> {
    Engine::default().recover_seed(chain)
}

/// `recover_seed_indexed` under the default engine.
pub fn recover_seed_indexed(rule: &GrowthRule, targets: &[(u64, Integer)]) -> Result<RecoveredSeed> {
    Engine::default().recover_seed_indexed(rule, targets)
}
