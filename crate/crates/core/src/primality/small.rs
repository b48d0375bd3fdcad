//! Word-sized primality and the small-prime table.

use std::sync::OnceLock;

/// Bound of the trial-division table.
pub const SMALL_PRIME_LIMIT: u32 = 10_000;

/// Witness set that makes the strong test exact for every `n < 3.3 * 10^24`.
const DETERMINISTIC_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// All primes below `limit` (sieve of Eratosthenes).
pub fn primes_below(limit: u32) -> Vec<u32> {
    let n = limit as usize;
    if n < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; n];
    let mut out = Vec::with_capacity(n / 8);
    for i in 2..n {
        if composite[i] {
            continue;
        }
        out.push(i as u32);
        let mut j = i * i;
        while j < n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Primes below [`SMALL_PRIME_LIMIT`].
pub fn small_primes() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| primes_below(SMALL_PRIME_LIMIT))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Strong probable-prime test of odd `n > 2` to base `a`.
pub(crate) fn strong_test_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// First deterministic base that proves `n` composite, if any.
pub(crate) fn u64_composite_witness(n: u64) -> Option<u64> {
    DETERMINISTIC_BASES
        .iter()
        .copied()
        .find(|&a| a % n != 0 && !strong_test_u64(n, a))
}

/// Exact primality for any `n < 2^64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    u64_composite_witness(n).is_none()
}
