//! Base-2 exponential of a dyadic endpoint.
//!
//! `2^x = 2^floor(x) * exp(frac(x) * ln 2)`, with `ln 2` from the series
//! `2 * atanh(1/3)` and `exp` from its Taylor series, both evaluated in
//! fixed point with every truncation pushed in the requested direction.

use super::dyadic::{shr_round, Dyadic, Round};
use super::{BigRealError, Result};
use rug::Integer;

/// Largest |x| accepted by `exp2` unless the caller raises it.
pub const DEFAULT_EXP2_GUARD: u64 = 1 << 32;

/// Lower and upper bounds of `ln 2 * 2^w` (as integers).
pub fn ln2_fixed(w: u32) -> (Integer, Integer) {
    // ln 2 = 2 * sum_{k>=0} 1 / ((2k+1) 3^(2k+1))
    let one = Integer::from(1) << (w + 2);
    let mut lo = Integer::new();
    let mut hi = Integer::new();
    let mut pow3 = Integer::from(3);
    let mut k: u32 = 0;
    loop {
        let den = Integer::from(&pow3 * (2 * k + 1));
        let num = Integer::from(1) << w;
        let (q, r) = num.div_rem(den);
        hi += &q;
        if r != 0 {
            hi += 1u32;
        }
        lo += q;
        if pow3 > one {
            break;
        }
        pow3 *= 9u32;
        k += 1;
    }
    // Remaining tail is below 2^-w.
    hi += 1u32;
    (lo * 2u32, hi * 2u32)
}

/// `exp(t / 2^w) * 2^w` bounded in the direction `dir`, for `0 <= t < 2^w`.
fn exp_fixed(t: &Integer, w: u32, dir: Round) -> Integer {
    let one = Integer::from(1) << w;
    let mut sum = one.clone();
    let mut term = one;
    let mut k: u32 = 1;
    loop {
        let prod = Integer::from(&term * t);
        term = shr_round(&prod, i64::from(w), dir);
        term = match dir {
            Round::Down => term / k,
            Round::Up => {
                let (q, r) = term.div_rem(Integer::from(k));
                if r != 0 {
                    q + 1u32
                } else {
                    q
                }
            }
        };
        if term == 0 {
            break;
        }
        sum += &term;
        if dir == Round::Up && term <= 1 {
            // Tail beyond this term is at most one unit for t < 1.
            sum += 1u32;
            break;
        }
        k += 1;
    }
    sum
}

/// `2^x` rounded to `bits` significant bits in direction `dir`.
pub(crate) fn exp2_dyadic(x: &Dyadic, bits: u32, dir: Round, guard: u64) -> Result<Dyadic> {
    if x.msb() > 64 || x.floor().significant_bits() > 64 || x.to_f64().abs() > guard as f64 {
        return Err(BigRealError::Resource(format!(
            "exp2 argument exceeds the guard {guard}"
        )));
    }
    let whole = x.floor();
    let whole_i64 = whole.to_i64().expect("guarded above");
    let frac = x.sub_exact(&Dyadic::from_integer(whole));
    if frac.is_zero() {
        return Ok(Dyadic::new(Integer::from(1), whole_i64));
    }
    let w = bits + 32;
    let (ln2_lo, ln2_hi) = ln2_fixed(w);
    let ln2 = match dir {
        Round::Down => ln2_lo,
        Round::Up => ln2_hi,
    };
    // t = frac * ln2 in fixed point; frac = m * 2^e with e < 0, 0 < frac < 1.
    let prod = Integer::from(frac.mantissa() * &ln2);
    let t = if frac.exponent() >= 0 {
        prod << (frac.exponent() as u32)
    } else {
        shr_round(&prod, -frac.exponent(), dir)
    };
    let e = exp_fixed(&t, w, dir);
    Ok(Dyadic::new(e, whole_i64 - i64::from(w)).round(bits, dir))
}
