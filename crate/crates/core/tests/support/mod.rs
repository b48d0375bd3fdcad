//! Oracles shared by the property tests and the acceptance run. Each check
//! returns `Err(reason)` instead of panicking so callers can count
//! failures.
#![allow(dead_code)]

use primechain::bigreal::{Decision, Dyadic, RationalExponent, RealInterval};
use primechain::chains::{Engine, GrowthRule, Policy, PrimeChain};
use primechain::primality::{is_probable_prime, next_prime};
use primechain::trees::PrimeForest;
use rand::Rng;
use rug::ops::Pow;
use rug::{Integer, Rational};

pub type Check = Result<(), String>;

pub fn rational(d: &Dyadic) -> Rational {
    let m = Rational::from(d.mantissa());
    let e = d.exponent();
    if e >= 0 {
        m * Rational::from(Integer::from(1) << e as u32)
    } else {
        m / Rational::from(Integer::from(1) << (-e) as u32)
    }
}

fn lo_hi(x: &RealInterval) -> (Rational, Rational) {
    (rational(x.lo()), rational(x.hi()))
}

fn rat_pow(x: &Rational, k: u32) -> Rational {
    x.clone().pow(k)
}

/// One random case of the containment property.
#[derive(Clone, Debug)]
pub struct Case {
    pub num: u64,
    pub den: u64,
    pub bits: u32,
    pub op: u8,
    pub k: u32,
}

impl Case {
    pub fn random<R: Rng>(rng: &mut R) -> Case {
        Case {
            num: rng.gen_range(1..=1_000_000_000_000),
            den: rng.gen_range(1..=1_000_000),
            bits: rng.gen_range(64..=512),
            op: rng.gen_range(0..OPS),
            k: rng.gen_range(2..=9),
        }
    }

    pub fn x(&self) -> Rational {
        Rational::from((self.num, self.den))
    }
}

pub const OPS: u8 = 8;

/// Evaluates operation `op` on an enclosure of `num/den` and checks the
/// exact image against the output with rational arithmetic.
pub fn containment(c: &Case) -> Check {
    let x = c.x();
    let xi = RealInterval::from_ratio(&Integer::from(c.num), &Integer::from(c.den), c.bits).map_err(|e| e.to_string())?;
    let (xl, xh) = lo_hi(&xi);
    if !(xl <= x && x <= xh) {
        return Err(format!("input enclosure misses {x}"));
    }
    let err = |e: primechain::bigreal::BigRealError| format!("{c:?}: {e}");
    let k = c.k;
    match c.op {
        0 => {
            let (l, h) = lo_hi(&xi.pow_integer(u64::from(k)).map_err(err)?);
            let y = rat_pow(&x, k);
            ensure(l <= y && y <= h, c, "pow_integer")
        }
        1 => {
            // y = x^(1/k)  <=>  y^k = x
            let (l, h) = lo_hi(&xi.nth_root(k).map_err(err)?);
            ensure(rat_pow(&l, k) <= x && x <= rat_pow(&h, k), c, "nth_root")
        }
        2 | 3 => {
            let e = RationalExponent::new(k + 1, k).expect("k+1 > k");
            let (p, q) = (e.num(), e.den());
            if c.op == 2 {
                // y = x^(p/q)  <=>  y^q = x^p
                let (l, h) = lo_hi(&xi.pow_rational(e).map_err(err)?);
                let xp = rat_pow(&x, p);
                ensure(rat_pow(&l, q) <= xp && xp <= rat_pow(&h, q), c, "pow_rational")
            } else {
                // y = x^(q/p)  <=>  y^p = x^q
                let (l, h) = lo_hi(&xi.pow_rational_inverse(e).map_err(err)?);
                let xq = rat_pow(&x, q);
                ensure(rat_pow(&l, p) <= xq && xq <= rat_pow(&h, p), c, "pow_rational_inverse")
            }
        }
        4 => {
            // Small exponents only: y = 2^(n/d) with d <= 64.
            let d = c.den % 64 + 1;
            let n = c.num % (40 * d);
            let xi = RealInterval::from_ratio(&Integer::from(n), &Integer::from(d), c.bits).map_err(err)?;
            let (l, h) = lo_hi(&xi.exp2().map_err(err)?);
            let two_n = Rational::from(Integer::from(1) << n as u32);
            let d = d as u32;
            ensure(rat_pow(&l, d) <= two_n && two_n <= rat_pow(&h, d), c, "exp2")
        }
        5 => {
            let yi = RealInterval::from_ratio(&Integer::from(c.den), &Integer::from(c.k), c.bits).map_err(err)?;
            let y = Rational::from((c.den, c.k));
            let (sl, sh) = lo_hi(&xi.add(&yi));
            let (ml, mh) = lo_hi(&xi.mul(&yi));
            let (dl, dh) = lo_hi(&xi.sub(&yi));
            let s = Rational::from(&x + &y);
            let m = Rational::from(&x * &y);
            let d = Rational::from(&x - &y);
            ensure(sl <= s && s <= sh && ml <= m && m <= mh && dl <= d && d <= dh, c, "add/mul/sub")
        }
        6 => {
            let (l, h) = lo_hi(&xi.div_integer(&Integer::from(k)).map_err(err)?);
            let y = Rational::from(&x / Rational::from(k));
            ensure(l <= y && y <= h, c, "div_integer")
        }
        _ => rounding(c),
    }
}

fn ensure(ok: bool, c: &Case, what: &str) -> Check {
    if ok {
        Ok(())
    } else {
        Err(format!("{what} does not contain the exact image for {c:?}"))
    }
}

/// Decided roundings agree with the exact value and with a recomputation
/// at four times the precision.
pub fn rounding(c: &Case) -> Check {
    let x = c.x();
    let at = |bits: u32| RealInterval::from_ratio(&Integer::from(c.num), &Integer::from(c.den), bits).expect("valid");
    let exact_round = Rational::from(&x + Rational::from((1, 2))).floor().numer().clone();
    let exact_floor = x.clone().floor().numer().clone();
    let (lo, hi) = (at(c.bits), at(4 * c.bits));
    if let Ok(Decision::Decided(m)) = lo.round_nearest() {
        if m != exact_round || hi.round_nearest().ok().and_then(Decision::decided).is_some_and(|n| n != m) {
            return Err(format!("round_nearest gave {m} for {c:?}"));
        }
    }
    if let Decision::Decided(m) = lo.floor_of() {
        if m != exact_floor || hi.floor_of().decided().is_some_and(|n| n != m) {
            return Err(format!("floor_of gave {m} for {c:?}"));
        }
    }
    Ok(())
}

/// Doubling the precision never widens `x^(p/q)`, `x^(1/k)` or `x^k`.
pub fn monotone_refinement(c: &Case) -> Check {
    let e = RationalExponent::new(c.k + 1, c.k).expect("k+1 > k");
    let at = |bits: u32| -> Result<[RealInterval; 3], String> {
        let xi = RealInterval::from_ratio(&Integer::from(c.num), &Integer::from(c.den), bits).map_err(|e| e.to_string())?;
        Ok([
            xi.pow_rational(e).map_err(|e| e.to_string())?,
            xi.nth_root(c.k).map_err(|e| e.to_string())?,
            xi.pow_integer(u64::from(c.k)).map_err(|e| e.to_string())?,
        ])
    };
    let (a, b) = (at(c.bits)?, at(2 * c.bits)?);
    for (x, y) in a.iter().zip(&b) {
        if y.width() > x.width() {
            return Err(format!("width grew from {} to {} for {c:?}", x.width(), y.width()));
        }
    }
    Ok(())
}

/// `nth_root(x^q, q)` meets `x`.
pub fn root_power(c: &Case) -> Check {
    let xi = RealInterval::from_ratio(&Integer::from(c.num), &Integer::from(c.den), c.bits).map_err(|e| e.to_string())?;
    let back = xi
        .pow_integer(u64::from(c.k))
        .and_then(|y| y.nth_root(c.k))
        .map_err(|e| e.to_string())?;
    if back.intersects(&xi) {
        Ok(())
    } else {
        Err(format!("root of power misses x for {c:?}"))
    }
}

/// `is_prime[n]` for `n < limit`.
pub fn sieve(limit: usize) -> Vec<bool> {
    let mut is = vec![true; limit];
    for slot in is.iter_mut().take(2) {
        *slot = false;
    }
    let mut i = 2;
    while i * i < limit {
        if is[i] {
            for j in (i * i..limit).step_by(i) {
                is[j] = false;
            }
        }
        i += 1;
    }
    is
}

/// The primality battery against a sieve, for every `n < limit`.
pub fn primality_matches_sieve(limit: usize) -> Check {
    use rayon::prelude::*;
    let oracle = sieve(limit);
    let bad: Vec<usize> = (0..limit)
        .into_par_iter()
        .filter(|&n| is_probable_prime(&Integer::from(n), 2).is_prime_like() != oracle[n])
        .collect();
    match bad.first() {
        None => Ok(()),
        Some(n) => Err(format!("{} disagreements with the sieve, first at {n}", bad.len())),
    }
}

/// Start primes for random chains; the 11/10 range sits where windows hold
/// a dozen primes or more.
pub fn start_range(e: RationalExponent) -> (Integer, Integer) {
    match (e.num(), e.den()) {
        (3, 2) => (Integer::from(2), Integer::from(5000)),
        (5, 4) => (Integer::from(100), Integer::from(100_000)),
        _ => {
            let lo = Integer::from(10).pow(30);
            let hi = Integer::from(&lo + 1_000_000u32);
            (lo, hi)
        }
    }
}

/// A chain of `len` primes under `power:e:nearest`, each step chosen
/// uniformly among the first few primes of its window.
pub fn random_chain<R: Rng>(engine: &Engine, e: RationalExponent, len: usize, rng: &mut R) -> PrimeChain {
    let rule: GrowthRule = format!("power:{e}:nearest").parse().expect("valid rule");
    let (lo, hi) = start_range(e);
    let span = Integer::from(&hi - &lo).to_u64().expect("small span");
    'restart: loop {
        let start = next_prime(&Integer::from(&lo + rng.gen_range(0..span))).value;
        let mut chain = PrimeChain::start(rule, Policy::Nearest, start).expect("one prime");
        while chain.len() < len {
            let alts = engine.alternatives(&chain, 8).expect("alternatives");
            if alts.is_empty() {
                continue 'restart;
            }
            let pick = alts[rng.gen_range(0..alts.len())].clone();
            let mut primes = chain.primes().to_vec();
            primes.push(pick);
            chain = PrimeChain::new(rule, Policy::Nearest, chain.offset(), primes).expect("increasing");
        }
        return chain;
    }
}

/// Recovered digits regenerate the chain exactly.
pub fn roundtrip(engine: &Engine, chain: &PrimeChain) -> Check {
    let seed = engine.recover_seed(chain).map_err(|e| format!("recover: {e}"))?;
    let g = engine
        .generate_from_index(&seed.source(), &chain.rule(), chain.offset(), chain.len() as u64)
        .map_err(|e| format!("generate: {e}"))?;
    if g.values() == chain.primes() {
        Ok(())
    } else {
        Err(format!(
            "seed {} regenerates {:?}, not {:?}",
            seed.digits,
            g.values(),
            chain.primes()
        ))
    }
}

/// `round(q^(2/3))` by integers alone: the `m` with
/// `(2m-1)^3 <= 8q^2 < (2m+1)^3`; the second value flags an exact tie.
pub fn parent_oracle(q: u64) -> (u64, bool) {
    let t = Integer::from(q).pow(2) * 8u32;
    let mut m = (q as f64).powf(2.0 / 3.0).round() as u64;
    let cube = |m: u64| Integer::from(2 * m + 1).pow(3);
    while m > 0 && cube(m - 1) > t {
        m -= 1;
    }
    while cube(m) <= t {
        m += 1;
    }
    let tie = m > 0 && cube(m - 1) == t;
    (m, tie)
}

/// Every prime of a 3/2 forest has the parent the integer oracle gives, no
/// tie occurs, and the tree sizes tile the prime set.
pub fn tiling(forest: &PrimeForest, primes_below_limit: usize) -> Check {
    if forest.parent_of.len() != primes_below_limit {
        return Err(format!(
            "forest holds {} primes, expected {primes_below_limit}",
            forest.parent_of.len()
        ));
    }
    for (&q, &p) in &forest.parent_of {
        let (m, tie) = parent_oracle(q);
        if tie {
            return Err(format!("exact tie at {q}"));
        }
        if m != p {
            return Err(format!("parent of {q} is {p}, oracle says {m}"));
        }
    }
    let stats = forest.stats();
    let total: usize = stats.tree_sizes.values().sum();
    if total != forest.parent_of.len() || stats.orphan_count != 0 {
        return Err(format!("trees cover {total} primes with {} orphans", stats.orphan_count));
    }
    Ok(())
}

/// Window enumeration of children agrees with parent inversion.
pub fn children_agree(engine: &Engine, forest: &PrimeForest, limit: u64) -> Check {
    for p in forest.primes().take_while(|&p| p <= limit) {
        let by_window = forest.children_by_window(engine, p).map_err(|e| e.to_string())?;
        let by_parent = forest.children(p);
        if by_window != by_parent {
            return Err(format!("children of {p}: windows {by_window:?}, parents {by_parent:?}"));
        }
    }
    Ok(())
}
