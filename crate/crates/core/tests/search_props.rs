use primechain::chains::{Engine, GrowthRule};
use primechain::primality::next_prime;
use primechain::search::SearchConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Integer;

fn rule() -> GrowthRule {
    "power:5/4:nearest".parse().unwrap()
}

fn config(seed: u64) -> SearchConfig {
    SearchConfig {
        rng_seed: seed,
        restart_count: 3,
        steps_per_temperature: 40,
        target_length: 12,
        time_budget: 1.0,
        start_lo: Integer::from(100),
        start_hi: Integer::from(10_000),
        ..SearchConfig::default()
    }
}

#[test]
fn same_config_same_chains() {
    let engine = Engine::default();
    // No time budget in play, so every run follows the same schedule.
    let c = SearchConfig {
        target_length: 9,
        time_budget: 1e9,
        ..config(11)
    };
    let a = engine.anneal_chain(&rule(), &c).unwrap();
    let b = engine.anneal_chain(&rule(), &c).unwrap();
    assert_eq!(a.best, b.best);
    assert_eq!(a.energy.to_bits(), b.energy.to_bits());
    for (x, y) in a.restarts.iter().zip(&b.restarts) {
        assert_eq!(x.best, y.best);
        assert_eq!((x.moves, x.accepted), (y.moves, y.accepted));
    }
}

#[test]
fn best_never_shrinks_and_always_validates() {
    let engine = Engine::default();
    for seed in 0..4 {
        let out = engine.anneal_chain(&rule(), &config(seed)).unwrap();
        for r in &out.restarts {
            assert!(r.best_lengths.windows(2).all(|w| w[0] <= w[1]), "restart {}", r.restart);
            assert_eq!(r.best_lengths.last().copied(), Some(r.best.len()));
            engine.validate(&r.best).unwrap();
        }
        engine.validate(&out.best).unwrap();
        assert!(out.restarts.iter().all(|r| r.best.len() <= out.best.len()));
    }
}

fn median(mut v: Vec<usize>) -> f64 {
    v.sort_unstable();
    let n = v.len();
    (v[(n - 1) / 2] + v[n / 2]) as f64 / 2.0
}

#[test]
fn annealing_beats_greedy_on_median() {
    let engine = Engine::default();
    let runs = 20;
    let annealed: Vec<usize> = (0..runs)
        .map(|s| engine.anneal_chain(&rule(), &config(s)).unwrap().best.len())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let greedy: Vec<usize> = (0..runs)
        .map(|_| {
            let start = next_prime(&Integer::from(rng.gen_range(100u32..10_000))).value;
            engine.greedy_extend(&rule(), &start, 11).unwrap().chain.len()
        })
        .collect();
    let (a, g) = (median(annealed.clone()), median(greedy.clone()));
    println!("anneal {annealed:?} median {a}; greedy {greedy:?} median {g}");
    assert!(a >= g);
}
