use super::decimal::{decimal_digits, format_fixed, parse_literal, pow10};
use super::dyadic::{div_round, Dyadic, Round};
use super::exp::{exp2_dyadic, DEFAULT_EXP2_GUARD};
use super::root::root_dyadic;
use super::{BigRealError, Decision, PrecisionPolicy, RationalExponent, Result, MIN_PRECISION_BITS};
use rug::Integer;
use std::fmt;

/// A closed interval `[lo, hi]` of binary floats known to contain an exact real.
///
/// `precision_bits` is the working precision: each endpoint carries at most
/// that many significant bits, and every operation rounds its result outward
/// to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    lo: Dyadic,
    hi: Dyadic,
    precision_bits: u32,
}

fn check_bits(bits: u32) -> Result<u32> {
    if bits < MIN_PRECISION_BITS {
        return Err(BigRealError::Domain("precision below 64 bits"));
    }
    Ok(bits)
}

/// `num / den` rounded to `bits` in direction `dir` (den != 0).
fn ratio_round(num: &Integer, den: &Integer, bits: u32, dir: Round) -> Dyadic {
    let (num, den) = if *den < 0 {
        (Integer::from(-num), Integer::from(-den))
    } else {
        (num.clone(), den.clone())
    };
    if num == 0 {
        return Dyadic::zero();
    }
    let k = i64::from(bits) + 2 + i64::from(den.significant_bits())
        - i64::from(num.significant_bits());
    let q = if k >= 0 {
        div_round(num << (k as u32), &den, dir)
    } else {
        div_round(num, &(den << ((-k) as u32)), dir)
    };
    Dyadic::new(q, -k).round(bits, dir)
}

impl RealInterval {
    /// Builds `[lo, hi]`, rounding the endpoints outward to `bits`.
    pub fn new(lo: Dyadic, hi: Dyadic, bits: u32) -> Result<RealInterval> {
        let bits = check_bits(bits)?;
        if lo > hi {
            return Err(BigRealError::Domain("interval with lo > hi"));
        }
        Ok(RealInterval {
            lo: lo.round(bits, Round::Down),
            hi: hi.round(bits, Round::Up),
            precision_bits: bits,
        })
    }

    fn from_parts(lo: Dyadic, hi: Dyadic, bits: u32) -> RealInterval {
        debug_assert!(lo <= hi);
        RealInterval {
            lo,
            hi,
            precision_bits: bits,
        }
    }

    pub fn point(value: Dyadic, bits: u32) -> Result<RealInterval> {
        RealInterval::new(value.clone(), value, bits)
    }

    pub fn from_integer(value: &Integer, bits: u32) -> Result<RealInterval> {
        RealInterval::point(Dyadic::from(value), bits)
    }

    pub fn from_i64(value: i64, bits: u32) -> Result<RealInterval> {
        RealInterval::point(Dyadic::from(value), bits)
    }

    /// Enclosure of the rational `num / den`.
    pub fn from_ratio(num: &Integer, den: &Integer, bits: u32) -> Result<RealInterval> {
        let bits = check_bits(bits)?;
        if *den == 0 {
            return Err(BigRealError::Domain("zero denominator"));
        }
        Ok(RealInterval::from_parts(
            ratio_round(num, den, bits, Round::Down),
            ratio_round(num, den, bits, Round::Up),
            bits,
        ))
    }

    /// Enclosure of every real whose decimal expansion begins with `text`.
    ///
    /// The working precision is the policy's start, raised to cover the
    /// literal's digits (capped at `max_bits`).
    pub fn parse_decimal(text: &str, policy: &PrecisionPolicy) -> Result<RealInterval> {
        let lit = parse_literal(text)?;
        let needed = (f64::from(lit.total_len) * std::f64::consts::LOG2_10).ceil() as u32 + 64;
        let bits = needed.clamp(policy.start_bits, policy.max_bits);
        RealInterval::parse_decimal_at(text, bits)
    }

    /// Prefix enclosure of `text` at an explicit working precision.
    pub fn parse_decimal_at(text: &str, bits: u32) -> Result<RealInterval> {
        let bits = check_bits(bits)?;
        let lit = parse_literal(text)?;
        let den = pow10(lit.frac_len);
        let (lo_num, hi_num) = if lit.negative {
            (Integer::from(-&lit.digits) - 1u32, Integer::from(-&lit.digits))
        } else {
            (lit.digits.clone(), Integer::from(&lit.digits + 1u32))
        };
        Ok(RealInterval::from_parts(
            ratio_round(&lo_num, &den, bits, Round::Down),
            ratio_round(&hi_num, &den, bits, Round::Up),
            bits,
        ))
    }

    /// Enclosure of the exact value written in `text`.
    pub fn parse_decimal_exact(text: &str, bits: u32) -> Result<RealInterval> {
        let lit = parse_literal(text)?;
        let num = if lit.negative {
            Integer::from(-&lit.digits)
        } else {
            lit.digits
        };
        RealInterval::from_ratio(&num, &pow10(lit.frac_len), bits)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub_exact(&self.lo)
    }

    pub fn midpoint(&self) -> Dyadic {
        Dyadic::midpoint(&self.lo, &self.hi)
    }

    /// Same enclosure at another working precision (rounded outward when
    /// shrinking; endpoints unchanged when growing).
    pub fn with_precision(&self, bits: u32) -> Result<RealInterval> {
        RealInterval::new(self.lo.clone(), self.hi.clone(), bits)
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_interval(&self, other: &RealInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &RealInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Intersection, or `None` when the intervals are disjoint.
    pub fn intersect(&self, other: &RealInterval) -> Option<RealInterval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        if lo > hi {
            return None;
        }
        Some(RealInterval::from_parts(
            lo,
            hi,
            self.precision_bits.max(other.precision_bits),
        ))
    }

    pub fn hull(&self, other: &RealInterval) -> RealInterval {
        RealInterval::from_parts(
            (&self.lo).min(&other.lo).clone(),
            (&self.hi).max(&other.hi).clone(),
            self.precision_bits.max(other.precision_bits),
        )
    }

    pub fn neg(&self) -> RealInterval {
        RealInterval::from_parts(self.hi.neg(), self.lo.neg(), self.precision_bits)
    }

    pub fn add(&self, other: &RealInterval) -> RealInterval {
        let bits = self.precision_bits.max(other.precision_bits);
        RealInterval::from_parts(
            self.lo
                .add_for_rounding(&other.lo, bits)
                .round(bits, Round::Down),
            self.hi
                .add_for_rounding(&other.hi, bits)
                .round(bits, Round::Up),
            bits,
        )
    }

    pub fn sub(&self, other: &RealInterval) -> RealInterval {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RealInterval) -> RealInterval {
        let bits = self.precision_bits.max(other.precision_bits);
        let products = [
            self.lo.mul_exact(&other.lo),
            self.lo.mul_exact(&other.hi),
            self.hi.mul_exact(&other.lo),
            self.hi.mul_exact(&other.hi),
        ];
        let lo = products.iter().min().expect("non-empty");
        let hi = products.iter().max().expect("non-empty");
        RealInterval::from_parts(lo.round(bits, Round::Down), hi.round(bits, Round::Up), bits)
    }

    pub fn mul_integer(&self, k: &Integer) -> RealInterval {
        let k = Dyadic::from(k);
        let (a, b) = (self.lo.mul_exact(&k), self.hi.mul_exact(&k));
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let bits = self.precision_bits;
        RealInterval::from_parts(lo.round(bits, Round::Down), hi.round(bits, Round::Up), bits)
    }

    pub fn div_integer(&self, d: &Integer) -> Result<RealInterval> {
        if *d == 0 {
            return Err(BigRealError::Domain("division by zero"));
        }
        let bits = self.precision_bits;
        let quot = |x: &Dyadic, dir: Round| {
            ratio_round(x.mantissa(), d, bits, dir).mul_pow2(x.exponent())
        };
        let (lo, hi) = if *d > 0 {
            (quot(&self.lo, Round::Down), quot(&self.hi, Round::Up))
        } else {
            (quot(&self.hi, Round::Down), quot(&self.lo, Round::Up))
        };
        Ok(RealInterval::from_parts(lo, hi, bits))
    }

    fn require_positive(&self) -> Result<()> {
        if self.lo.signum().is_le() {
            return Err(BigRealError::Domain("operation requires a positive interval"));
        }
        Ok(())
    }

    /// `x^k` by square-and-multiply, rounding outward after every product.
    pub fn pow_integer(&self, k: u64) -> Result<RealInterval> {
        self.require_positive()?;
        let bits = self.precision_bits;
        let pow = |base: &Dyadic, dir: Round| -> Dyadic {
            let mut result = Dyadic::from(1);
            let mut square = base.clone();
            let mut e = k;
            while e > 0 {
                if e & 1 == 1 {
                    result = result.mul_exact(&square).round(bits, dir);
                }
                e >>= 1;
                if e > 0 {
                    square = square.mul_exact(&square).round(bits, dir);
                }
            }
            result
        };
        Ok(RealInterval::from_parts(
            pow(&self.lo, Round::Down),
            pow(&self.hi, Round::Up),
            bits,
        ))
    }

    /// `x^(1/q)` via Newton iteration on integer roots of the endpoints.
    pub fn nth_root(&self, q: u32) -> Result<RealInterval> {
        self.require_positive()?;
        if q == 0 {
            return Err(BigRealError::Domain("zeroth root"));
        }
        let bits = self.precision_bits;
        let stall = |s: super::NewtonStall| {
            BigRealError::Precision(format!(
                "Newton root did not settle within {} iterations",
                s.iterations
            ))
        };
        Ok(RealInterval::from_parts(
            root_dyadic(&self.lo, q, bits, Round::Down).map_err(stall)?,
            root_dyadic(&self.hi, q, bits, Round::Up).map_err(stall)?,
            bits,
        ))
    }

    /// `x^(p/q)` computed as the q-th root of `x^p`.
    pub fn pow_rational(&self, e: RationalExponent) -> Result<RealInterval> {
        self.pow_integer(u64::from(e.num()))?.nth_root(e.den())
    }

    /// `x^(q/p)`, the inverse of [`pow_rational`](Self::pow_rational):
    /// root first so intermediates stay small.
    pub fn pow_rational_inverse(&self, e: RationalExponent) -> Result<RealInterval> {
        self.nth_root(e.num())?.pow_integer(u64::from(e.den()))
    }

    /// `2^x`; arguments beyond `2^32` in magnitude trip the resource guard.
    pub fn exp2(&self) -> Result<RealInterval> {
        self.exp2_guarded(DEFAULT_EXP2_GUARD)
    }

    pub fn exp2_guarded(&self, guard: u64) -> Result<RealInterval> {
        let bits = self.precision_bits;
        Ok(RealInterval::from_parts(
            exp2_dyadic(&self.lo, bits, Round::Down, guard)?,
            exp2_dyadic(&self.hi, bits, Round::Up, guard)?,
            bits,
        ))
    }

    /// The integer `m` with the whole interval strictly inside
    /// `(m - 1/2, m + 1/2)`; undecided when a half-integer is touched.
    pub fn round_nearest(&self) -> Result<Decision<Integer>> {
        let half = Dyadic::half_of(Integer::from(1));
        let lo_shift = self.lo.add_exact(&half);
        if self.is_point() && lo_shift.is_integer() {
            let twice = self.lo.mul_pow2(1).to_integer().expect("half-integer");
            return Err(BigRealError::ExactTie(twice));
        }
        let m_lo = lo_shift.floor();
        let m_hi = self.hi.add_exact(&half).floor();
        if m_lo != m_hi || lo_shift.is_integer() {
            return Ok(Decision::Undecided);
        }
        Ok(Decision::Decided(m_lo))
    }

    /// `floor(x)` when both endpoints share it.
    pub fn floor_of(&self) -> Decision<Integer> {
        let a = self.lo.floor();
        if a == self.hi.floor() {
            Decision::Decided(a)
        } else {
            Decision::Undecided
        }
    }

    /// Largest `d <= cap` with `width <= 10^-d` (0 when the width exceeds 1).
    pub fn certain_frac_digits(&self, cap: u32) -> u32 {
        let w = self.width();
        if w.is_zero() {
            return cap;
        }
        let within = |d: u32| w.mul_exact(&Dyadic::from_integer(pow10(d))) <= Dyadic::from(1);
        if !within(0) {
            return 0;
        }
        let est = (-w.log2_approx() * std::f64::consts::LOG10_2).floor().max(0.0) as u32;
        let mut d = est.min(cap);
        while d > 0 && !within(d) {
            d -= 1;
        }
        while d < cap && within(d + 1) {
            d += 1;
        }
        d
    }

    /// Midpoint printed with every decimal the width supports; the exact
    /// value lies within one unit of the last printed digit.
    pub fn to_decimal_string(&self, cap: u32) -> String {
        format_fixed(&self.midpoint(), self.certain_frac_digits(cap))
    }

    /// Decimal digit count of the integer part of the midpoint.
    pub fn integer_digits(&self) -> usize {
        decimal_digits(&self.midpoint().floor())
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.certain_frac_digits(60) + 3;
        write!(
            f,
            "[{}, {}]",
            format_fixed(&self.lo, d),
            format_fixed(&self.hi, d)
        )
    }
}
