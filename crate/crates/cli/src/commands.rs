use crate::args::{GlobalArgs, PolicyArg};
use crate::{Context, Failure};
use primechain::bigreal::{format_fixed, RationalExponent};
use primechain::chains::{recover_scale_constant, GrowthRule, Policy, PrimeChain, SeedSource};
use primechain::search::SearchConfig;
use primechain::store::{ChainRecord, ChainStore, Record};
use primechain::trees::{build_forest, export_dot};
use rug::Integer;
use serde::Deserialize;
use std::path::Path;

pub fn parse_integer(text: &str) -> Option<Integer> {
    Integer::from_str_radix(text.trim(), 10).ok()
}

/// Short form of a long integer: leading and trailing digits.
pub fn abbreviate(n: &Integer) -> String {
    let s = n.to_string();
    if s.len() <= 44 {
        s
    } else {
        format!("{}...{}", &s[..20], &s[s.len() - 20..])
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_rule(text: &str) -> Result<GrowthRule, Failure> {
    text.parse().map_err(|e| Failure::Usage(format!("rule {text:?}: {e}")))
}

fn print_chain(chain: &PrimeChain) {
    for (i, p) in chain.indexed() {
        println!("{i:>4}  {}", abbreviate(&p));
    }
}

pub fn generate(
    ctx: &mut Context,
    seed_file: Option<&Path>,
    seed: Option<&str>,
    rule: &str,
    count: u64,
    first: Option<u64>,
    policy: PolicyArg,
) -> Result<String, Failure> {
    let text = match (seed_file, seed) {
        (Some(path), _) => read(path)?,
        (None, Some(s)) => s.to_string(),
        (None, None) => return Err(Failure::Usage("give --seed-file or --seed".into())),
    };
    let source = SeedSource::decimal(&text).map_err(|e| Failure::Usage(format!("seed: {e}")))?;
    let rule = parse_rule(rule)?;
    if count == 0 {
        return Err(Failure::Usage("count must be at least 1".into()));
    }
    let first = first.unwrap_or_else(|| rule.first_index());
    let g = ctx.engine.generate_from_index(&source, &rule, first, count)?;
    for t in &g.terms {
        println!("{:>4}  {:<44}  {:>5} digits  {}", t.index, abbreviate(&t.value), t.digits(), t.status);
    }
    let run = g.prime_run();
    if run > 0 {
        let policy = match policy {
            PolicyArg::Nearest => Policy::Nearest,
            PolicyArg::NextAbove => Policy::NextAbove,
        };
        let primes = g.terms[..run].iter().map(|t| t.value.clone()).collect();
        let digits = match &source {
            SeedSource::Decimal(d) => d.clone(),
            SeedSource::Interval(_) => unreachable!("decimal seed"),
        };
        let chain = PrimeChain::new(rule, policy, first, primes)?.with_seed(digits);
        ctx.records.push(Record::Chain(ChainRecord::from_chain(&chain, "generate")));
    }
    println!("{} terms, leading prime run {run}", g.terms.len());
    match g.exhausted_at {
        Some(step) => Err(Failure::Undecided(format!(
            "seed digits run out at index {step} after {} of {count} terms",
            g.terms.len()
        ))),
        None => Ok(format!("generated {} terms", g.terms.len())),
    }
}

/// A chain from a JSON chain record, the last chain of a store file, or a
/// plain list of primes under `rule`.
fn load_chain(path: &Path, rule: &str, offset: Option<u64>) -> Result<PrimeChain, Failure> {
    let text = read(path)?;
    if let Ok(rec) = serde_json::from_str::<ChainRecord>(&text) {
        return Ok(rec.to_chain()?);
    }
    if text.trim_start().starts_with('{') {
        let chains = ChainStore::new(path).chains().map_err(|e| Failure::Usage(e.to_string()))?;
        let rec = chains
            .last()
            .ok_or_else(|| Failure::Usage(format!("no chain record in {}", path.display())))?;
        return Ok(rec.to_chain()?);
    }
    let rule = parse_rule(rule)?;
    let primes = text
        .split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']')
        .filter(|t| !t.is_empty())
        .map(|t| parse_integer(t).ok_or_else(|| Failure::Usage(format!("not an integer: {t:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let offset = offset.unwrap_or_else(|| rule.first_index());
    PrimeChain::new(rule, Policy::Nearest, offset, primes).map_err(|e| Failure::Usage(e.to_string()))
}

pub fn recover(ctx: &mut Context, path: &Path, rule: &str, offset: Option<u64>) -> Result<String, Failure> {
    let chain = load_chain(path, rule, offset)?;
    let digits = match chain.rule() {
        GrowthRule::ScaledNn { .. } => {
            let r = recover_scale_constant(chain.primes(), chain.offset())?;
            let bits = 64 + 4 * r.hi().denom().significant_bits();
            let x = r.to_interval(bits).map_err(Failure::from)?;
            println!("c in [{}, {})", r.lo(), r.hi());
            format_fixed(&x.midpoint(), x.certain_frac_digits(u32::MAX / 8) + 4)
        }
        _ => {
            let seed = ctx.engine.recover_seed(&chain)?;
            let frac = seed.enclosure.certain_frac_digits(u32::MAX / 8);
            println!(
                "enclosure [{}, {}]",
                format_fixed(seed.enclosure.lo(), frac + 2),
                format_fixed(seed.enclosure.hi(), frac + 2)
            );
            seed.digits
        }
    };
    println!("{digits}");
    let chain = chain.with_seed(digits.clone());
    ctx.records.push(Record::Chain(ChainRecord::from_chain(&chain, "recover")));
    Ok(format!("recovered {} digits", digits.len()))
}

#[derive(Debug, Deserialize)]
struct SearchFile {
    rule: String,
    #[serde(flatten)]
    config: SearchConfig,
}

pub fn search(ctx: &mut Context, path: &Path, global: &GlobalArgs) -> Result<String, Failure> {
    let file: SearchFile =
        toml::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let rule = parse_rule(&file.rule)?;
    let mut config = file.config;
    if let Some(seed) = global.rng_seed {
        config.rng_seed = seed;
    }
    if let Some(budget) = global.time_budget {
        config.time_budget = budget;
    }
    config.check().map_err(|e| Failure::Usage(e.to_string()))?;
    ctx.rng_seeds.push(config.rng_seed);
    ctx.config["search"] = serde_json::json!({ "rule": rule, "config": config });
    let out = ctx.engine.anneal_chain(&rule, &config)?;
    for r in &out.restarts {
        println!(
            "restart {:>2}: best length {:>3}, {} moves, {} accepted, {}",
            r.restart,
            r.best.len(),
            r.moves,
            r.accepted,
            r.stop
        );
        ctx.records.push(Record::Progress(r.progress(config.lambda)));
    }
    print_chain(&out.best);
    if let Some(seed) = out.best.seed() {
        println!("seed {seed}");
    }
    println!("best length {}, energy {:.6}, {}", out.best.len(), out.energy, out.stop);
    ctx.records.push(Record::Chain(ChainRecord::from_chain(&out.best, "search")));
    Ok(format!("best length {} ({})", out.best.len(), out.stop))
}

pub fn tree(ctx: &mut Context, limit: u64, exponent: &str, dot: Option<&Path>) -> Result<String, Failure> {
    let e: RationalExponent = exponent
        .parse()
        .map_err(|err| Failure::Usage(format!("exponent {exponent:?}: {err}")))?;
    let forest = build_forest(limit, e).map_err(|err| Failure::Compute(err.to_string()))?;
    let stats = forest.stats();
    println!(
        "{} primes, {} roots, {} edges, max depth {}, orphans {}",
        forest.parent_of.len(),
        stats.root_count,
        forest.edges.len(),
        stats.max_depth,
        stats.orphan_count
    );
    let mut largest: Vec<(u64, usize)> = stats.tree_sizes.iter().map(|(&r, &n)| (r, n)).collect();
    largest.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    for (root, size) in largest.iter().take(5) {
        println!("tree {root}: {size} primes");
    }
    if let Some(path) = dot {
        std::fs::write(path, export_dot(&forest))
            .map_err(|err| Failure::Usage(format!("cannot write {}: {err}", path.display())))?;
        println!("wrote {}", path.display());
    }
    ctx.records.push(Record::Forest(forest.record()));
    Ok(format!("forest of {} primes, {} roots", forest.parent_of.len(), stats.root_count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abbreviation_keeps_both_ends() {
        let n: Integer = "1".repeat(60).parse().unwrap();
        let s = abbreviate(&n);
        assert_eq!(s.len(), 43);
        assert!(s.starts_with("11111") && s.contains("..."));
        assert_eq!(abbreviate(&Integer::from(3331)), "3331");
    }

    #[test]
    fn integers_parse_with_whitespace() {
        assert_eq!(parse_integer(" 223\n"), Some(Integer::from(223)));
        assert_eq!(parse_integer("2.5"), None);
    }
}
