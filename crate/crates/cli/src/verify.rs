//! `verify`: built-in constants against the sequences published with them.

use crate::args::Target;
use crate::commands::{abbreviate, parse_integer};
use crate::{Context, Failure};
use clap::ValueEnum;
use primechain::bigreal::{clean_decimal_text, Dyadic};
use primechain::chains::{Generation, GrowthRule, SeedSource};
use primechain::constants::*;
use primechain::primality::PrimeStatus;
use primechain::store::Record;
use rug::ops::Pow;
use rug::Integer;
use serde_json::json;

/// What a term is checked against.
enum Expect {
    /// The published value at this index.
    Value(Integer),
    /// Only primality.
    Prime,
}

struct Row {
    index: u64,
    value: Integer,
    status: PrimeStatus,
    pass: bool,
}

fn default_depth(target: Target) -> u64 {
    match target {
        Target::Mills => 3,
        Target::Wright => 3,
        Target::Plouffe54 => 20,
        Target::Plouffe32 => 10,
        Target::ScaledNn => 19,
        Target::Concat => 5,
        Target::AppendixS50 => 1,
    }
}

fn seed(text: &str) -> Result<SeedSource, Failure> {
    Ok(SeedSource::decimal(text)?)
}

fn ints<T: ToString>(values: &[T]) -> Vec<Integer> {
    values.iter().map(|v| parse_integer(&v.to_string()).expect("built-in integer")).collect()
}

fn rule(text: &str) -> GrowthRule {
    text.parse().expect("built-in rule")
}

pub fn run(ctx: &mut Context, target: Target, depth: Option<u64>) -> Result<String, Failure> {
    let depth = depth.unwrap_or_else(|| default_depth(target));
    if depth == 0 {
        return Err(Failure::Usage("depth must be at least 1".into()));
    }
    if target == Target::AppendixS50 {
        return s50(ctx);
    }
    let en = &ctx.engine;
    let (generation, expected): (Generation, Vec<Integer>) = match target {
        Target::Mills => {
            let g = en.verify_mills(&seed(MILLS_A)?, depth)?;
            let n = g.terms.len().max(1) as u64;
            (g, en.regenerate_mills(n)?.primes().to_vec())
        }
        Target::Wright => (en.verify_wright(&seed(WRIGHT_ALPHA)?, depth)?, ints(&WRIGHT_PRIMES)),
        Target::Plouffe54 => (
            en.generate_from_index(&seed(POW54_A0)?, &rule("power:5/4:nearest"), 1, depth)?,
            Vec::new(),
        ),
        Target::Plouffe32 => (
            en.generate_from_seed(&seed(POW32_A0)?, &rule("power:3/2:nearest"), depth)?,
            ints(&POW32_PUBLISHED),
        ),
        Target::ScaledNn => (
            en.scan_scaled_nn(&seed(SCALED_NN_C)?, SCALED_NN_START, SCALED_NN_START + depth - 1)?,
            ints(&SCALED_NN_PRIMES),
        ),
        Target::Concat => (
            en.generate_from_seed(&seed(CONCAT_A0)?, &rule("shift:10"), depth)?,
            ints(&CONCAT_PUBLISHED),
        ),
        Target::AppendixS50 => unreachable!(),
    };
    let rows: Vec<Row> = generation
        .terms
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let expect = expected.get(k).cloned().map_or(Expect::Prime, Expect::Value);
            let pass = t.status.is_prime_like()
                && match &expect {
                    Expect::Value(v) => *v == t.value,
                    Expect::Prime => true,
                };
            Row {
                index: t.index,
                value: t.value.clone(),
                status: t.status,
                pass,
            }
        })
        .collect();
    print_rows(&rows);

    let mut failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("term {}", r.index))
        .collect();
    if target == Target::Plouffe54 {
        // The published values are scattered over the orbit.
        for p in ints(&POW54_PUBLISHED) {
            match rows.iter().find(|r| r.value == p) {
                Some(r) => println!("published {p} found at index {}", r.index),
                None if generation.exhausted_at.is_none() => {
                    println!("published {p} not found");
                    failures.push(format!("published value {p}"));
                }
                None => println!("published {p} not reached"),
            }
        }
    }
    let name = target.to_possible_value().expect("named target").get_name().to_string();
    let (verdict, result) = if !failures.is_empty() {
        let msg = format!("verify {name}: FAIL ({})", failures.join(", "));
        ("FAIL", Err(Failure::Mismatch(msg)))
    } else if let Some(step) = generation.exhausted_at {
        let msg = format!(
            "verify {name}: UNDECIDED, the constant's digits run out at index {step} ({} of {depth} terms)",
            rows.len()
        );
        ("UNDECIDED", Err(Failure::Undecided(msg)))
    } else {
        ("PASS", Ok(format!("verify {name}: PASS ({} terms)", rows.len())))
    };
    if let Ok(line) = &result {
        println!("{line}");
    }
    ctx.records.push(Record::Data {
        name: "verify".into(),
        value: json!({
            "target": name,
            "depth": depth,
            "verdict": verdict,
            "exhausted_at": generation.exhausted_at,
            "terms": rows.iter().map(|r| json!({
                "index": r.index,
                "value": r.value.to_string(),
                "status": r.status,
                "pass": r.pass,
            })).collect::<Vec<_>>(),
        }),
    });
    result
}

fn print_rows(rows: &[Row]) {
    for r in rows {
        let digits = r.value.to_string().len();
        println!(
            "{:>4}  {:<44}  {:>5} digits  {:<14}  {}",
            r.index,
            abbreviate(&r.value),
            digits,
            r.status.to_string(),
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
}

/// The printed 807-digit `S(50)`: probable primality, digit count, and
/// where it falls in the orbit of seeds `10^500 + 961 + eps`.
fn s50(ctx: &mut Context) -> Result<String, Failure> {
    let value = parse_integer(&clean_decimal_text(S50)).expect("built-in integer");
    let digits = value.to_string().len();
    let status = ctx.engine.tester.test(&value).status;
    let pass = status.is_prime_like() && digits == S50_DIGITS;
    println!(
        "S(50)  {}  {digits} digits  {status}  {}",
        abbreviate(&value),
        if pass { "PASS" } else { "FAIL" }
    );
    let base = Integer::from(10).pow(S50_SEED_POWER) + S50_SEED_OFFSET;
    let lo = Dyadic::from(&base);
    let hi = lo.add_exact(&Dyadic::half_of(Integer::from(1)));
    let rule: GrowthRule = format!("power:{S50_EXPONENT}:nearest").parse().expect("built-in rule");
    let index = ctx.engine.locate_in_orbit(&rule, &lo, &hi, &value, 80)?;
    match index {
        Some(n) => println!("orbit of 10^{S50_SEED_POWER} + {S50_SEED_OFFSET} + eps: range at index {n} holds S(50)"),
        None => println!("orbit of 10^{S50_SEED_POWER} + {S50_SEED_OFFSET} + eps: S(50) not in range up to index 80"),
    }
    ctx.records.push(Record::Data {
        name: "verify".into(),
        value: json!({
            "target": "appendix-s50",
            "digits": digits,
            "status": status,
            "orbit_index": index,
            "verdict": if pass { "PASS" } else { "FAIL" },
        }),
    });
    if pass {
        let line = "verify appendix-s50: PASS".to_string();
        println!("{line}");
        Ok(line)
    } else {
        Err(Failure::Mismatch(format!("verify appendix-s50: FAIL ({digits} digits, {status})")))
    }
}
