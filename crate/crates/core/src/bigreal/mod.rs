//! Arbitrary-precision real intervals with outward (directed) rounding.
//!
//! Every operation consumes intervals that contain some exact real and
//! returns an interval guaranteed to contain the exact image. Endpoints are
//! binary floats ([`Dyadic`]) rounded outward to the interval's working
//! precision after each step; decimal text appears only at the I/O edges.

mod decimal;
mod dyadic;
mod exp;
mod interval;
mod root;

pub use decimal::{clean_decimal_text, format_fixed};
pub use dyadic::{Dyadic, Round};
pub use exp::{ln2_fixed, DEFAULT_EXP2_GUARD};
pub use interval::RealInterval;
pub use root::{floor_root, NewtonStall};

use rug::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Lowest working precision an interval may carry.
pub const MIN_PRECISION_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BigRealError {
    #[error("malformed decimal literal {text:?}: {reason}")]
    Parse { text: String, reason: &'static str },
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("resource guard tripped: {0}")]
    Resource(String),
    #[error("value lies exactly on the half-integer {0}/2; rounding convention undefined")]
    ExactTie(Integer),
}

pub type Result<T> = std::result::Result<T, BigRealError>;

/// Outcome of rounding an enclosure to an integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision<T> {
    Decided(T),
    /// The enclosure straddles a rounding boundary; retry at higher precision.
    Undecided,
}

impl<T> Decision<T> {
    pub fn decided(self) -> Option<T> {
        match self {
            Decision::Decided(v) => Some(v),
            Decision::Undecided => None,
        }
    }

    pub fn is_decided(&self) -> bool {
        matches!(self, Decision::Decided(_))
    }
}

/// An exponent `num/den` in lowest terms; serialized as `"num/den"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct RationalExponent {
    num: u32,
    den: u32,
}

impl RationalExponent {
    /// Builds `num/den` reduced to lowest terms. Requires `num > den >= 1`,
    /// except for the identity `1/1`.
    pub fn new(num: u32, den: u32) -> Result<RationalExponent> {
        if den == 0 || num == 0 {
            return Err(BigRealError::Domain("exponent terms must be positive"));
        }
        let g = gcd(num, den);
        let (num, den) = (num / g, den / g);
        if num <= den && !(num == 1 && den == 1) {
            return Err(BigRealError::Domain("exponent must exceed 1"));
        }
        Ok(RationalExponent { num, den })
    }

    pub fn identity() -> RationalExponent {
        RationalExponent { num: 1, den: 1 }
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn is_identity(&self) -> bool {
        self.num == self.den
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

impl fmt::Display for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl std::str::FromStr for RationalExponent {
    type Err = BigRealError;

    fn from_str(s: &str) -> Result<RationalExponent> {
        let bad = || BigRealError::Parse {
            text: s.to_string(),
            reason: "expected an exponent like 5/4 or 3",
        };
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: u32 = n.parse().map_err(|_| bad())?;
        let d: u32 = d.parse().map_err(|_| bad())?;
        RationalExponent::new(n, d)
    }
}

impl From<RationalExponent> for String {
    fn from(e: RationalExponent) -> String {
        e.to_string()
    }
}

impl TryFrom<String> for RationalExponent {
    type Error = BigRealError;

    fn try_from(s: String) -> Result<RationalExponent> {
        s.parse()
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// How callers escalate working precision when a rounding is undecided.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub max_bits: u32,
    pub growth: f64,
}

impl Default for PrecisionPolicy {
    fn default() -> PrecisionPolicy {
        PrecisionPolicy {
            start_bits: 128,
            max_bits: 1 << 20,
            growth: 2.0,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(start_bits: u32, max_bits: u32, growth: f64) -> Result<PrecisionPolicy> {
        if start_bits < MIN_PRECISION_BITS || start_bits > max_bits || growth <= 1.0 {
            return Err(BigRealError::Domain(
                "precision policy needs 64 <= start_bits <= max_bits and growth > 1",
            ));
        }
        Ok(PrecisionPolicy {
            start_bits,
            max_bits,
            growth,
        })
    }

    /// Same policy, but never starting below `bits`.
    pub fn starting_at(&self, bits: u32) -> PrecisionPolicy {
        PrecisionPolicy {
            start_bits: bits.clamp(self.start_bits, self.max_bits),
            ..*self
        }
    }

    /// The escalation sequence `start, start*growth, ...` capped at `max_bits`.
    pub fn ladder(&self) -> impl Iterator<Item = u32> {
        let max = self.max_bits;
        let growth = self.growth;
        let mut next = Some(self.start_bits.max(MIN_PRECISION_BITS).min(max));
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur >= max {
                None
            } else {
                let grown = ((f64::from(cur) * growth).ceil() as u64).max(u64::from(cur) + 1);
                Some(grown.min(u64::from(max)) as u32)
            };
            Some(cur)
        })
    }
}

/// Runs `attempt` at each precision of the policy until it yields a decided
/// value; fails with a precision error once the ladder is exhausted.
pub fn escalate<T, F>(policy: &PrecisionPolicy, what: &str, mut attempt: F) -> Result<T>
where
    F: FnMut(u32) -> Result<Decision<T>>,
{
    let mut last = policy.start_bits;
    for bits in policy.ladder() {
        last = bits;
        if let Decision::Decided(v) = attempt(bits)? {
            return Ok(v);
        }
    }
    Err(BigRealError::Precision(format!(
        "{what} still undecided at {last} bits"
    )))
}
