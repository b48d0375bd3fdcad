//! Windowed sieve over arbitrary-size integers: a mod-210 wheel removes
//! multiples of 2, 3, 5 and 7, then each table prime strikes its multiples.
//! Survivors still need a probable-prime test.

use rug::Integer;
use std::sync::OnceLock;

/// Candidates per sieve block.
pub const BLOCK: u32 = 1 << 16;

const WHEEL: u32 = 210;

fn wheel_coprime() -> &'static [bool; WHEEL as usize] {
    static TABLE: OnceLock<[bool; WHEEL as usize]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [false; WHEEL as usize];
        for (r, slot) in t.iter_mut().enumerate() {
            *slot = r % 2 != 0 && r % 3 != 0 && r % 5 != 0 && r % 7 != 0;
        }
        t
    })
}

/// Offsets `i < len` for which `lo + i` survives the wheel and the sieve
/// by `primes` (which must be ascending and may include 2..7).
pub fn survivors(lo: &Integer, len: u32, primes: &[u32]) -> Vec<u32> {
    debug_assert!(*lo >= 0);
    let len_us = len as usize;
    let mut alive = vec![true; len_us];
    let small_lo = lo.to_u64();

    // 0 and 1 are not prime.
    if let Some(l) = small_lo {
        for v in l..2 {
            if let Some(slot) = alive.get_mut((v - l) as usize) {
                *slot = false;
            }
        }
    }

    let wheel = wheel_coprime();
    let base = lo.mod_u(WHEEL);
    for (i, slot) in alive.iter_mut().enumerate() {
        let r = (base as usize + i) % WHEEL as usize;
        if !wheel[r] {
            let is_wheel_prime = small_lo
                .and_then(|l| l.checked_add(i as u64))
                .is_some_and(|v| matches!(v, 2 | 3 | 5 | 7));
            if !is_wheel_prime {
                *slot = false;
            }
        }
    }

    for &p in primes.iter().filter(|&&p| p > 7) {
        let r = lo.mod_u(p);
        let mut start = u64::from((p - r) % p);
        // Smaller multiples carry a smaller table factor; starting at p^2
        // also keeps p itself alive.
        let square = u64::from(p) * u64::from(p);
        if let Some(l) = small_lo {
            if l + start < square {
                start = square.saturating_sub(l);
            }
        }
        let mut j = start as usize;
        while j < len_us {
            alive[j] = false;
            j += p as usize;
        }
    }

    alive
        .iter()
        .enumerate()
        .filter_map(|(i, &a)| a.then_some(i as u32))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primality::small::{is_prime_u64, small_primes};

    #[test]
    fn never_removes_primes() {
        for lo in [0u64, 1, 2, 5, 100, 9_990, 1_000_000, 123_456_789] {
            let s = survivors(&Integer::from(lo), 5000, small_primes());
            for i in 0..5000u32 {
                let v = lo + u64::from(i);
                if is_prime_u64(v) {
                    assert!(s.contains(&i), "prime {v} was sieved out");
                }
            }
        }
    }

    #[test]
    fn small_window_is_exact() {
        // Below 10^8 the table sieve removes every composite.
        let s = survivors(&Integer::from(0), 200, small_primes());
        let primes: Vec<u32> = (0..200).filter(|&n| is_prime_u64(u64::from(n))).collect();
        assert_eq!(s, primes);
    }

    #[test]
    fn big_window_survivors_are_coprime_to_table() {
        let lo = Integer::from(Integer::u_pow_u(10, 50)) + 7u32;
        for off in survivors(&lo, 2000, small_primes()) {
            let v = Integer::from(&lo + off);
            for &p in small_primes() {
                assert!(!v.is_divisible_u(p), "{v} divisible by {p}");
            }
        }
    }
}
