//! Images of real boundaries under a growth rule, and the live set of a
//! chain: the reals `a(n)` consistent with every prime seen so far.

use super::{ChainError, GrowthRule, Result, Rounding};
use crate::bigreal::{Decision, Dyadic, RealInterval, DEFAULT_EXP2_GUARD};
use rug::Integer;
use std::cmp::Ordering;

/// A real known exactly or through an enclosure.
#[derive(Clone, Debug)]
pub(crate) enum Value {
    Exact(Dyadic),
    Approx(RealInterval),
}

impl Value {
    fn ends(&self) -> (&Dyadic, &Dyadic) {
        match self {
            Value::Exact(d) => (d, d),
            Value::Approx(x) => (x.lo(), x.hi()),
        }
    }

    /// An enclosure carrying at least `bits` of precision.
    pub(crate) fn to_interval(&self, bits: u32) -> Result<RealInterval> {
        match self {
            Value::Exact(d) => Ok(RealInterval::point(d.clone(), bits.max(d.significant_bits()))?),
            Value::Approx(x) => Ok(x.clone()),
        }
    }

    pub(crate) fn ceil(&self) -> Decision<Integer> {
        let (lo, hi) = self.ends();
        let c = lo.ceil();
        if c == hi.ceil() {
            Decision::Decided(c)
        } else {
            Decision::Undecided
        }
    }
}

pub(crate) fn dyadic_pow(x: &Dyadic, k: u32) -> Dyadic {
    let mut acc = Dyadic::from(1);
    let mut sq = x.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul_exact(&sq);
        }
        k >>= 1;
        if k > 0 {
            sq = sq.mul_exact(&sq);
        }
    }
    acc
}

/// One application of the rule to an exact dyadic, when the result is
/// again an exact dyadic of manageable size.
fn exact_step(rule: &GrowthRule, x: &Dyadic) -> Result<Option<Dyadic>> {
    Ok(match rule {
        GrowthRule::Power { exponent, .. } if exponent.den() == 1 => {
            Some(dyadic_pow(x, exponent.num()))
        }
        GrowthRule::DigitShift { base } => Some(x.mul_exact(&Dyadic::from(i64::from(*base)))),
        GrowthRule::Exp2Tower => match x.to_integer() {
            Some(k) => {
                let k = k
                    .to_i64()
                    .filter(|k| k.unsigned_abs() <= DEFAULT_EXP2_GUARD)
                    .ok_or_else(|| ChainError::Resource(format!("2^{x} is too large")))?;
                Some(Dyadic::new(Integer::from(1), k))
            }
            None => None,
        },
        _ => None,
    })
}

/// One application of the rule to an enclosure.
pub(crate) fn step_interval(rule: &GrowthRule, x: &RealInterval) -> Result<RealInterval> {
    Ok(match rule {
        GrowthRule::Power { exponent, .. } => x.pow_rational(*exponent)?,
        GrowthRule::DigitShift { base } => x.mul_integer(&Integer::from(*base)),
        GrowthRule::Exp2Tower => x.exp2()?,
        GrowthRule::ScaledNn { .. } => {
            return Err(ChainError::Unsupported("the scaled n^n rule has no step map".into()))
        }
    })
}

/// One application of the inverse map to an enclosure.
pub(crate) fn unstep_interval(rule: &GrowthRule, x: &RealInterval) -> Result<RealInterval> {
    Ok(match rule {
        GrowthRule::Power { exponent, .. } => x.pow_rational_inverse(*exponent)?,
        GrowthRule::DigitShift { base } => x.div_integer(&Integer::from(*base))?,
        _ => {
            return Err(ChainError::Unsupported(format!(
                "backward recovery is defined for power and digit-shift rules, not {rule}"
            )))
        }
    })
}

/// `x` pushed `steps` times through the rule, exactly when possible.
pub(crate) fn image(rule: &GrowthRule, x: &Dyadic, steps: u64, bits: u32) -> Result<Value> {
    let mut cur = x.clone();
    let mut done = 0;
    while done < steps {
        match exact_step(rule, &cur)? {
            Some(next) => {
                cur = next;
                done += 1;
            }
            None => break,
        }
    }
    if done == steps {
        return Ok(Value::Exact(cur));
    }
    let mut iv = RealInterval::point(cur, bits)?;
    for _ in done..steps {
        iv = step_interval(rule, &iv)?;
    }
    Ok(Value::Approx(iv))
}

/// Smallest integer whose rounding strip meets `[v, inf)`.
pub(crate) fn reach_lo(rounding: Rounding, v: &Value) -> Decision<Integer> {
    // m - d + 1 > v  <=>  m > v + d - 1
    let shift = rounding.offset().sub_exact(&Dyadic::from(1));
    let (lo, hi) = v.ends();
    let a = lo.add_exact(&shift).floor();
    if a == hi.add_exact(&shift).floor() {
        Decision::Decided(a + 1u32)
    } else {
        Decision::Undecided
    }
}

/// Largest integer whose rounding strip meets `(-inf, v)`.
pub(crate) fn reach_hi(rounding: Rounding, v: &Value) -> Decision<Integer> {
    // m - d < v  <=>  m < v + d
    let shift = rounding.offset();
    let (lo, hi) = v.ends();
    let a = lo.add_exact(&shift).ceil();
    if a == hi.add_exact(&shift).ceil() {
        Decision::Decided(a - 1u32)
    } else {
        Decision::Undecided
    }
}

pub(crate) fn compare(v: &Value, d: &Dyadic) -> Decision<Ordering> {
    let (lo, hi) = v.ends();
    if lo > d {
        Decision::Decided(Ordering::Greater)
    } else if hi < d {
        Decision::Decided(Ordering::Less)
    } else if lo == d && hi == d {
        Decision::Decided(Ordering::Equal)
    } else {
        Decision::Undecided
    }
}

/// A boundary of the live set: the exact real `origin` at orbit index
/// `level`, pushed forward through the rule as needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Boundary {
    pub level: u64,
    pub origin: Dyadic,
}

/// Reals `[lo, hi)` at orbit index `level` whose backward orbit rounds to
/// every prime of the chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct LiveSet {
    pub level: u64,
    pub lo: Boundary,
    pub hi: Boundary,
}

impl LiveSet {
    pub(crate) fn of_prime(rounding: Rounding, level: u64, p: &Integer) -> LiveSet {
        LiveSet {
            level,
            lo: Boundary {
                level,
                origin: rounding.strip_lo(p),
            },
            hi: Boundary {
                level,
                origin: rounding.strip_hi(p),
            },
        }
    }
}

/// Working precision adequate for a value of roughly `2^log2` in size.
pub(crate) fn bits_for(log2: f64, guard: u32) -> u32 {
    if !log2.is_finite() || log2 > f64::from(u32::MAX / 2) {
        return u32::MAX / 2;
    }
    (log2.max(1.0).ceil() as u32).saturating_add(guard)
}

/// Estimated `log2` of a boundary pushed forward to `level`.
pub(crate) fn boundary_log2(rule: &GrowthRule, b: &Boundary, level: u64) -> f64 {
    let mut l = b.origin.log2_approx();
    for _ in b.level..level {
        l = rule.grow_log2(l);
    }
    l
}
