use super::sieve::{survivors, BLOCK};
use super::{PrimalityError, PrimeCandidate, PrimeTester, SearchWindow};
use crate::bigreal::{Dyadic, RealInterval};
use rayon::prelude::*;
use rug::Integer;
use std::sync::OnceLock;

/// Candidates at or above this size are tested in parallel batches.
const PARALLEL_BITS: u32 = 1024;

fn default_tester() -> &'static PrimeTester {
    static TESTER: OnceLock<PrimeTester> = OnceLock::new();
    TESTER.get_or_init(PrimeTester::default)
}

/// First probable prime among `lo + offsets[..]`, in offset order.
fn first_in(tester: &PrimeTester, lo: &Integer, offsets: &[u32]) -> Option<PrimeCandidate> {
    let test = |off: &u32| {
        let c = tester.test(&Integer::from(lo + *off));
        c.is_prime_like().then_some(c)
    };
    if lo.significant_bits() < PARALLEL_BITS {
        return offsets.iter().find_map(test);
    }
    let batch = (2 * rayon::current_num_threads()).max(4);
    offsets
        .chunks(batch)
        .find_map(|chunk| chunk.par_iter().find_map_first(test))
}

/// Opening block size: about forty mean prime gaps near `n`, so small
/// searches do not sieve a full block.
fn opening_block(n: &Integer) -> u32 {
    n.significant_bits().saturating_mul(32).clamp(256, BLOCK)
}

fn block_len(from: &Integer, to: &Integer, cap: u32) -> u32 {
    let span = Integer::from(to - from);
    span.to_u32().map_or(cap, |s| s.min(cap))
}

/// Smallest probable prime in `[from, to)`; unbounded when `to` is `None`.
fn scan_up(tester: &PrimeTester, from: &Integer, to: Option<&Integer>) -> Option<PrimeCandidate> {
    let mut lo = Integer::from(from.max(&Integer::ZERO));
    let mut cap = opening_block(&lo);
    loop {
        let len = match to {
            Some(t) if lo >= *t => return None,
            Some(t) => block_len(&lo, t, cap),
            None => cap,
        };
        let offs = survivors(&lo, len, tester.sieve_primes());
        if let Some(c) = first_in(tester, &lo, &offs) {
            return Some(c);
        }
        lo += len;
        cap = cap.saturating_mul(2).min(BLOCK);
    }
}

/// Largest probable prime in `[floor, upto]` (both inclusive).
fn scan_down(tester: &PrimeTester, upto: &Integer, floor: &Integer) -> Option<PrimeCandidate> {
    let floor = Integer::from(floor.max(&Integer::ZERO));
    let mut hi = Integer::from(upto + 1u32);
    let mut cap = opening_block(&hi);
    while hi > floor {
        let len = block_len(&floor, &hi, cap);
        cap = cap.saturating_mul(2).min(BLOCK);
        let lo = Integer::from(&hi - len);
        let mut offs = survivors(&lo, len, tester.sieve_primes());
        offs.reverse();
        if let Some(c) = first_in(tester, &lo, &offs) {
            return Some(c);
        }
        hi = lo;
    }
    None
}

impl PrimeTester {
    /// Smallest probable prime `> n`.
    pub fn next_prime(&self, n: &Integer) -> PrimeCandidate {
        scan_up(self, &Integer::from(n + 1u32), None).expect("primes are unbounded")
    }

    /// Largest probable prime `< n`; requires `n >= 3`.
    pub fn prev_prime(&self, n: &Integer) -> Result<PrimeCandidate, PrimalityError> {
        if *n < 3 {
            return Err(PrimalityError::Domain("no prime below n < 3"));
        }
        Ok(scan_down(self, &Integer::from(n - 1u32), &Integer::from(2))
            .expect("2 lies in every range scanned"))
    }

    /// Smallest probable prime in the window.
    pub fn first_prime_in_window(&self, w: &SearchWindow) -> Option<PrimeCandidate> {
        scan_up(self, w.lo(), Some(w.hi()))
    }

    /// Largest probable prime in the window.
    pub fn last_prime_in_window(&self, w: &SearchWindow) -> Option<PrimeCandidate> {
        scan_down(self, &w.last(), w.lo())
    }

    /// Every probable prime in the window, ascending.
    pub fn primes_in_window(&self, w: &SearchWindow) -> Vec<PrimeCandidate> {
        let mut out = Vec::new();
        let mut lo = w.lo().clone();
        while lo < *w.hi() {
            let len = block_len(&lo, w.hi(), BLOCK);
            for off in survivors(&lo, len, self.sieve_primes()) {
                let c = self.test(&Integer::from(&lo + off));
                if c.is_prime_like() {
                    out.push(c);
                }
            }
            lo += len;
        }
        out
    }

    /// The probable prime in `[lo_bound, hi_bound]` closest to `target`;
    /// equidistant primes resolve upward. Fails with a precision error when
    /// the enclosure of `target` cannot separate two candidates.
    pub fn nearest_prime(
        &self,
        lo_bound: &Integer,
        hi_bound: &Integer,
        target: &RealInterval,
    ) -> Result<Option<PrimeCandidate>, PrimalityError> {
        let up_from = target.lo().ceil().max(lo_bound.clone());
        let above = scan_up(self, &up_from, Some(&Integer::from(hi_bound + 1u32)));
        // No need to look further below than the distance to `above`.
        let down_to = match &above {
            Some(p) => {
                let reach = Integer::from(&p.value - &target.lo().floor());
                Integer::from(target.lo().floor() - reach).max(lo_bound.clone())
            }
            None => lo_bound.clone(),
        };
        let down_from = target.hi().floor().min(hi_bound.clone());
        let below = if down_from >= down_to {
            scan_down(self, &down_from, &down_to)
        } else {
            None
        };
        match (below, above) {
            (None, None) => Ok(None),
            (Some(b), None) => Ok(Some(b)),
            (None, Some(a)) => Ok(Some(a)),
            (Some(b), Some(a)) if a.value == b.value => Ok(Some(a)),
            (Some(b), Some(a)) => {
                // Compare target against the midpoint of the two candidates.
                let mid = Dyadic::half_of(Integer::from(&a.value + &b.value));
                if *target.hi() < mid {
                    Ok(Some(b))
                } else if *target.lo() > mid {
                    Ok(Some(a))
                } else if target.is_point() {
                    Ok(Some(a))
                } else {
                    Err(PrimalityError::Precision(format!(
                        "target enclosure straddles the midpoint of {} and {}",
                        b.value, a.value
                    )))
                }
            }
        }
    }
}

/// Smallest probable prime `> n` (default battery).
pub fn next_prime(n: &Integer) -> PrimeCandidate {
    default_tester().next_prime(n)
}

/// Largest probable prime `< n` (default battery); requires `n >= 3`.
pub fn prev_prime(n: &Integer) -> Result<PrimeCandidate, PrimalityError> {
    default_tester().prev_prime(n)
}

pub fn first_prime_in_window(w: &SearchWindow) -> Option<PrimeCandidate> {
    default_tester().first_prime_in_window(w)
}

pub fn last_prime_in_window(w: &SearchWindow) -> Option<PrimeCandidate> {
    default_tester().last_prime_in_window(w)
}

pub fn primes_in_window(w: &SearchWindow) -> Vec<PrimeCandidate> {
    default_tester().primes_in_window(w)
}

pub fn nearest_prime(
    lo_bound: &Integer,
    hi_bound: &Integer,
    target: &RealInterval,
) -> Result<Option<PrimeCandidate>, PrimalityError> {
    default_tester().nearest_prime(lo_bound, hi_bound, target)
}
