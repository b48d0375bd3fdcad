//! Binary floating endpoints `mantissa * 2^exponent` with directed rounding.

use rug::ops::DivRounding;
use rug::Integer;
use std::cmp::Ordering;
use std::fmt;

/// Rounding direction for a single endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// An exact dyadic rational `mantissa * 2^exponent`.
///
/// Values are kept normalized: the mantissa is odd, or zero with exponent 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: Integer,
    exponent: i64,
}

impl Dyadic {
    pub fn zero() -> Dyadic {
        Dyadic {
            mantissa: Integer::new(),
            exponent: 0,
        }
    }

    pub fn new(mantissa: Integer, exponent: i64) -> Dyadic {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    pub fn from_integer(value: Integer) -> Dyadic {
        Dyadic::new(value, 0)
    }

    /// `numerator / 2`, the value used for rounding-strip boundaries.
    pub fn half_of(numerator: Integer) -> Dyadic {
        Dyadic::new(numerator, -1)
    }

    fn normalize(&mut self) {
        if self.mantissa == 0 {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.find_one(0).unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exponent += i64::from(tz);
        }
    }

    pub fn mantissa(&self) -> &Integer {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn signum(&self) -> Ordering {
        self.mantissa.cmp0()
    }

    /// Number of significant bits in the mantissa.
    pub fn significant_bits(&self) -> u32 {
        self.mantissa.significant_bits()
    }

    /// Position of the leading bit: `2^(msb-1) <= |x| < 2^msb`. Zero for zero.
    pub fn msb(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN / 4;
        }
        self.exponent + i64::from(self.mantissa.significant_bits())
    }

    pub fn is_integer(&self) -> bool {
        self.exponent >= 0
    }

    /// Exact integer value; `None` when the value has a fractional part.
    pub fn to_integer(&self) -> Option<Integer> {
        if self.exponent < 0 {
            return None;
        }
        Some(Integer::from(&self.mantissa << shift_amount(self.exponent)))
    }

    pub fn floor(&self) -> Integer {
        if self.exponent >= 0 {
            Integer::from(&self.mantissa << shift_amount(self.exponent))
        } else {
            shr_round(&self.mantissa, -self.exponent, Round::Down)
        }
    }

    pub fn ceil(&self) -> Integer {
        if self.exponent >= 0 {
            Integer::from(&self.mantissa << shift_amount(self.exponent))
        } else {
            shr_round(&self.mantissa, -self.exponent, Round::Up)
        }
    }

    /// Round to at most `bits` significant bits in the given direction.
    pub fn round(&self, bits: u32, dir: Round) -> Dyadic {
        let have = self.mantissa.significant_bits();
        if have <= bits {
            return self.clone();
        }
        let drop = have - bits;
        Dyadic::new(
            shr_round(&self.mantissa, i64::from(drop), dir),
            self.exponent + i64::from(drop),
        )
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mantissa: Integer::from(-&self.mantissa),
            exponent: self.exponent,
        }
    }

    /// Exact sum. Operands whose scales differ by far more than `bits` are
    /// collapsed to a sticky bit, which leaves any later rounding to `bits`
    /// unchanged.
    pub fn add_for_rounding(&self, other: &Dyadic, bits: u32) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (big, small) = if self.msb() >= other.msb() {
            (self, other)
        } else {
            (other, self)
        };
        let threshold = big.exponent.min(big.msb() - i64::from(bits) - 4);
        if small.msb() < threshold - 1 {
            let sticky = Dyadic {
                mantissa: Integer::from(small.mantissa.signum_ref()),
                exponent: threshold - 2,
            };
            return big.add_exact(&sticky);
        }
        big.add_exact(small)
    }

    /// Exact sum; callers must ensure the exponent gap is reasonable.
    pub fn add_exact(&self, other: &Dyadic) -> Dyadic {
        let e = self.exponent.min(other.exponent);
        let a = Integer::from(&self.mantissa << shift_amount(self.exponent - e));
        let b = Integer::from(&other.mantissa << shift_amount(other.exponent - e));
        Dyadic::new(a + b, e)
    }

    pub fn sub_exact(&self, other: &Dyadic) -> Dyadic {
        self.add_exact(&other.neg())
    }

    pub fn mul_exact(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(
            Integer::from(&self.mantissa * &other.mantissa),
            self.exponent + other.exponent,
        )
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    /// Arithmetic midpoint of two dyadics (exact).
    pub fn midpoint(a: &Dyadic, b: &Dyadic) -> Dyadic {
        a.add_exact(b).mul_pow2(-1)
    }

    /// Approximate value as `f64` (saturates for huge magnitudes).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let (m, e) = self.mantissa.to_f64_exp();
        let total = i64::from(e) + self.exponent;
        if total > 1100 {
            return m.signum() * f64::INFINITY;
        }
        if total < -1100 {
            return 0.0;
        }
        m * (total as f64).exp2()
    }

    /// Approximate `log2(|x|)`, usable for sizing even for enormous values.
    pub fn log2_approx(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (m, e) = self.mantissa.to_f64_exp();
        m.abs().log2() + e as f64 + self.exponent as f64
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        let sa = self.signum();
        let sb = other.signum();
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == Ordering::Equal {
            return Ordering::Equal;
        }
        let ma = self.msb();
        let mb = other.msb();
        if ma != mb {
            let by_magnitude = ma.cmp(&mb);
            return if sa == Ordering::Greater {
                by_magnitude
            } else {
                by_magnitude.reverse()
            };
        }
        let e = self.exponent.min(other.exponent);
        let a = Integer::from(&self.mantissa << shift_amount(self.exponent - e));
        let b = Integer::from(&other.mantissa << shift_amount(other.exponent - e));
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Dyadic {
        Dyadic::from_integer(Integer::from(v))
    }
}

impl From<&Integer> for Dyadic {
    fn from(v: &Integer) -> Dyadic {
        Dyadic::from_integer(v.clone())
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

pub(crate) fn shift_amount(k: i64) -> u32 {
    u32::try_from(k).expect("shift exceeds the supported range")
}

/// `m / 2^k` rounded in the given direction (k >= 0).
pub(crate) fn shr_round(m: &Integer, k: i64, dir: Round) -> Integer {
    let k = shift_amount(k);
    match dir {
        Round::Down => Integer::from(m >> k),
        Round::Up => {
            let neg = Integer::from(-m);
            -Integer::from(&neg >> k)
        }
    }
}

/// `num / den` rounded in the given direction (den > 0).
pub(crate) fn div_round(num: Integer, den: &Integer, dir: Round) -> Integer {
    match dir {
        Round::Down => num.div_floor(den),
        Round::Up => num.div_ceil(den),
    }
}
