//! Integer q-th roots by Newton iteration, and the interval `nth_root` built on them.

use super::dyadic::{shr_round, Dyadic, Round};
use rug::ops::Pow;
use rug::Integer;

/// Newton failed to settle within its iteration cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NewtonStall {
    pub iterations: u32,
}

/// Iteration cap for a root carrying `precision_bits` significant bits.
pub(crate) fn iteration_cap(precision_bits: u32) -> u32 {
    4 * (32 - precision_bits.max(2).leading_zeros()) + 16
}

/// `floor(n^(1/q))` for `n >= 0`, plus whether the root is exact.
///
/// Starts above the root at `2^(log2(n)/q)` (leading bits taken from an f64
/// estimate, nudged upward) and runs the monotonically decreasing integer
/// Newton map `y -> ((q-1) y + n / y^(q-1)) / q` until it stops decreasing.
pub fn floor_root(n: &Integer, q: u32) -> Result<(Integer, bool), NewtonStall> {
    assert!(q >= 1, "root index must be positive");
    assert!(*n >= 0, "root of a negative integer");
    if q == 1 || *n <= 1 {
        return Ok((n.clone(), true));
    }
    let bits = n.significant_bits();
    if bits <= q {
        // 1 <= n < 2^q, so the root lies in [1, 2).
        return Ok((Integer::from(1), *n == 1));
    }
    let mut y = start_value(n, q);
    while Integer::from((&y).pow(q)) < *n {
        y <<= 1;
    }
    let cap = iteration_cap(bits / q + 1);
    let qm1 = q - 1;
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > cap {
            return Err(NewtonStall { iterations: cap });
        }
        let ypow = Integer::from((&y).pow(qm1));
        let next: Integer = (Integer::from(&y * qm1) + Integer::from(n / &ypow)) / q;
        if next >= y {
            break;
        }
        y = next;
    }
    // Final enclosure check: y^q <= n < (y+1)^q.
    let yq = Integer::from((&y).pow(q));
    debug_assert!(yq <= *n);
    debug_assert!(Integer::from((Integer::from(&y + 1u32)).pow(q)) > *n);
    let exact = yq == *n;
    Ok((y, exact))
}

fn start_value(n: &Integer, q: u32) -> Integer {
    let bits = n.significant_bits();
    let (mant, exp) = n.to_f64_exp();
    let log2n = mant.log2() + f64::from(exp);
    let log2root = log2n / f64::from(q);
    // Keep ~40 leading bits from the float estimate, inflated by 2^-30.
    let whole = log2root.floor();
    let frac = log2root - whole;
    let lead = (frac.exp2() * (1.0 + 2f64.powi(-30)) * 2f64.powi(40)).ceil() as u64;
    let shift = whole as i64 - 40;
    let lead = Integer::from(lead);
    let y = if shift >= 0 {
        lead << (shift as u32)
    } else {
        let r = shr_round(&lead, -shift, Round::Up);
        if r < 1 {
            Integer::from(1)
        } else {
            r
        }
    };
    debug_assert!(y.significant_bits() <= bits / q + 2);
    y
}

/// Root of a positive endpoint, rounded to `bits` in direction `dir`.
pub(crate) fn root_dyadic(
    x: &Dyadic,
    q: u32,
    bits: u32,
    dir: Round,
) -> Result<Dyadic, NewtonStall> {
    debug_assert!(x.signum().is_gt());
    if q == 1 {
        return Ok(x.round(bits, dir));
    }
    // Choose k so that n = x / 2^(qk) has at least q(bits+2) bits; then
    // x^(1/q) = n^(1/q) * 2^k with at least bits+2 bits of root.
    let q64 = i64::from(q);
    let need = q64 * (i64::from(bits) + 2);
    let k = (x.msb() - need).div_euclid(q64);
    let shift = x.exponent() - q64 * k;
    let n = if shift >= 0 {
        Integer::from(x.mantissa() << (shift as u32))
    } else {
        shr_round(x.mantissa(), -shift, dir)
    };
    let (r, exact) = floor_root(&n, q)?;
    let r = match dir {
        Round::Down => r,
        Round::Up if exact => r,
        Round::Up => r + 1u32,
    };
    Ok(Dyadic::new(r, k).round(bits, dir))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_and_inexact_roots() {
        assert_eq!(floor_root(&Integer::from(8), 3).unwrap(), (Integer::from(2), true));
        assert_eq!(floor_root(&Integer::from(9), 3).unwrap(), (Integer::from(2), false));
        assert_eq!(floor_root(&Integer::from(0), 5).unwrap(), (Integer::from(0), true));
        assert_eq!(floor_root(&Integer::from(31), 5).unwrap(), (Integer::from(1), false));
        let big = Integer::from(Integer::u_pow_u(10, 300)) - 1u32;
        let (r, exact) = floor_root(&big, 100).unwrap();
        assert_eq!(r, 999);
        assert!(!exact);
    }

    #[test]
    fn newton_agrees_with_gmp_root() {
        let mut x = Integer::from(7);
        for q in 2..=40u32 {
            x = x * 1_000_003u32 + q;
            let (r, exact) = floor_root(&x, q).unwrap();
            assert_eq!(r, Integer::from(x.root_ref(q)), "q={q}");
            assert_eq!(exact, Integer::from((&r).pow(q)) == x);
        }
    }

    #[test]
    fn cap_grows_with_precision() {
        assert_eq!(iteration_cap(64), 4 * 7 + 16);
        assert!(iteration_cap(1 << 20) > iteration_cap(1 << 10));
    }
}
