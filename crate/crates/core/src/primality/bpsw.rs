//! Baillie–PSW: a strong base-2 test followed by a strong Lucas test with
//! Selfridge's parameter choice.

use rug::Integer;

/// Why the Lucas stage rejected `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum LucasFailure {
    /// `n` is a perfect square, so no suitable `D` exists.
    Square,
    /// `gcd(D, n)` exposed a factor.
    Factor(Integer),
    /// The strong Lucas conditions failed for parameter `D`.
    Sequence { d: i64 },
}

/// Strong probable-prime test of odd `n > 3` to the given base.
pub(crate) fn strong_probable_prime(n: &Integer, base: &Integer) -> bool {
    let n_minus_1 = Integer::from(n - 1u32);
    let s = n_minus_1.find_one(0).expect("n > 1");
    let d = Integer::from(&n_minus_1 >> s);
    let mut x = Integer::from(base % n)
        .pow_mod(&d, n)
        .expect("modulus is positive");
    if x == 1 || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x.square_mut();
        x %= n;
        if x == n_minus_1 {
            return true;
        }
        if x == 1 {
            return false;
        }
    }
    false
}

fn half_mod(x: &mut Integer, n: &Integer) {
    if x.is_odd() {
        *x += n;
    }
    *x >>= 1;
}

fn reduce(x: &mut Integer, n: &Integer) {
    *x %= n;
    if *x < 0 {
        *x += n;
    }
}

/// Selfridge's method A: first `D` in 5, -7, 9, -11, ... with `(D/n) = -1`.
fn selfridge_d(n: &Integer) -> Result<i64, LucasFailure> {
    let mut d: i64 = 5;
    for attempt in 0.. {
        let j = Integer::from(d).jacobi(n);
        if j == -1 {
            return Ok(d);
        }
        if j == 0 {
            let g = Integer::from(d.unsigned_abs()).gcd(n);
            if g != *n {
                return Err(LucasFailure::Factor(g));
            }
        }
        if attempt == 8 && n.is_perfect_square() {
            return Err(LucasFailure::Square);
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    unreachable!()
}

/// Strong Lucas probable-prime test of odd `n > 3` that is not a multiple
/// of a small prime.
pub(crate) fn strong_lucas(n: &Integer) -> Result<i64, LucasFailure> {
    let d = selfridge_d(n)?;
    let p: i64 = 1;
    let q: i64 = (1 - d) / 4;
    let mut big_d = Integer::from(d);
    reduce(&mut big_d, n);
    let mut big_q = Integer::from(q);
    reduce(&mut big_q, n);

    // n + 1 = k * 2^s with k odd.
    let n_plus_1 = Integer::from(n + 1u32);
    let s = n_plus_1.find_one(0).expect("n + 1 > 0");
    let k = Integer::from(&n_plus_1 >> s);

    // Binary ladder for U_k, V_k and Q^k starting from index 1.
    let mut u = Integer::from(1);
    let mut v = Integer::from(p);
    let mut qk = big_q.clone();
    let bits = k.significant_bits();
    for i in (0..bits - 1).rev() {
        // index m -> 2m
        u *= &v;
        reduce(&mut u, n);
        v.square_mut();
        v -= Integer::from(&qk << 1);
        reduce(&mut v, n);
        qk.square_mut();
        reduce(&mut qk, n);
        if k.get_bit(i) {
            // index 2m -> 2m + 1
            let new_u = Integer::from(&u * p) + &v;
            let new_v = Integer::from(&big_d * &u) + Integer::from(&v * p);
            u = new_u;
            reduce(&mut u, n);
            half_mod(&mut u, n);
            v = new_v;
            reduce(&mut v, n);
            half_mod(&mut v, n);
            qk *= &big_q;
            reduce(&mut qk, n);
        }
    }
    if u == 0 || v == 0 {
        return Ok(d);
    }
    for _ in 1..s {
        v.square_mut();
        v -= Integer::from(&qk << 1);
        reduce(&mut v, n);
        if v == 0 {
            return Ok(d);
        }
        qk.square_mut();
        reduce(&mut qk, n);
    }
    Err(LucasFailure::Sequence { d })
}
