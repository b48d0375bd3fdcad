mod support;

use primechain::bigreal::RationalExponent;
use primechain::chains::{feasible_window, Engine, SeedSource};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn exponents() -> [RationalExponent; 3] {
    ["3/2", "5/4", "11/10"].map(|e| e.parse().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn recovered_seeds_regenerate_chains(which in 0usize..3, len in 5usize..=12, seed in any::<u64>()) {
        let engine = Engine::default();
        let e = exponents()[which];
        let chain = support::random_chain(&engine, e, len, &mut ChaCha8Rng::seed_from_u64(seed));
        support::roundtrip(&engine, &chain).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn extension_stays_in_windows(which in 0usize..3, seed in any::<u64>()) {
        let engine = Engine::default();
        let e = exponents()[which];
        let start = support::random_chain(&engine, e, 1, &mut ChaCha8Rng::seed_from_u64(seed));
        // Extension may stop early; whatever it emits must fit.
        let chain = engine.extend_chain(&start, 6).unwrap_or(start);
        engine.validate(&chain).map_err(|err| TestCaseError::fail(err.to_string()))?;
        for w in chain.primes().windows(2) {
            let win = feasible_window(&w[0], e, chain.rule().rounding()).unwrap();
            prop_assert!(win.contains(&w[1]), "{} outside {}", w[1], win);
        }
    }

    #[test]
    fn longer_prefixes_shrink_the_seed(which in 0usize..3, seed in any::<u64>()) {
        let engine = Engine::default();
        let e = exponents()[which];
        let chain = support::random_chain(&engine, e, 8, &mut ChaCha8Rng::seed_from_u64(seed));
        let mut last = None;
        for k in 1..=chain.len() {
            let width = engine.recover_seed(&chain.prefix(k).unwrap()).unwrap().enclosure.width();
            if let Some(prev) = &last {
                prop_assert!(width <= *prev, "prefix {k} widened");
            }
            last = Some(width);
        }
    }

    #[test]
    fn digit_lengths_grow_by_the_exponent(which in 0usize..3, seed in any::<u64>()) {
        let engine = Engine::default();
        let e = exponents()[which];
        let chain = support::random_chain(&engine, e, 10, &mut ChaCha8Rng::seed_from_u64(seed));
        for w in chain.primes().windows(2) {
            // Binary length, once past ten decimal digits.
            if w[0].significant_bits() > 34 {
                let ratio = f64::from(w[1].significant_bits()) / f64::from(w[0].significant_bits());
                prop_assert!((ratio / e.to_f64() - 1.0).abs() < 0.05, "{} -> {}", w[0], w[1]);
            }
        }
    }
}

#[test]
fn mills_recovery_reproduces_the_chain() {
    let engine = Engine::default();
    let chain = engine.regenerate_mills(8).unwrap();
    let seed = engine.recover_seed(&chain).unwrap();
    let g = engine.verify_mills(&seed.source(), 8).unwrap();
    assert_eq!(g.values(), chain.primes());
}

#[test]
fn published_three_halves_constant_agrees_with_recovery() {
    use primechain::bigreal::RealInterval;
    use primechain::chains::{PrimeChain, Policy};
    use primechain::constants::{POW32_A0, POW32_PUBLISHED};
    use rug::Integer;

    let engine = Engine::default();
    let primes: Vec<Integer> = POW32_PUBLISHED.iter().map(|p| p.parse().unwrap()).collect();
    let rule = "power:3/2:nearest".parse().unwrap();
    let chain = PrimeChain::new(rule, Policy::Nearest, 0, primes).unwrap();
    let seed = engine.recover_seed(&chain).unwrap();
    let printed = RealInterval::parse_decimal_at(POW32_A0, 512).unwrap();
    // Every seed realizing the 14 primes begins with the printed digits.
    assert!(printed.contains_interval(&seed.enclosure), "{} vs {}", seed.enclosure, printed);
    let g = engine.generate_from_seed(&SeedSource::decimal(POW32_A0).unwrap(), &rule, 14).unwrap();
    assert_eq!(g.values(), chain.primes()[..g.terms.len()]);
}
