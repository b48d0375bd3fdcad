//! Prime forests: the parent of a prime `q` is the nearest integer to
//! `q^(1/e)`, and `p -> q` is an edge when that parent is a prime `p < q`.

use crate::bigreal::{escalate, BigRealError, Decision, PrecisionPolicy, RationalExponent, RealInterval};
use crate::chains::{ChainError, Engine, Rounding};
use crate::primality::primes_below;
use crate::store::integer_list;
use rayon::prelude::*;
use rug::ops::Pow;
use rug::Integer;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write;
use thiserror::Error;

/// Largest limit the sieve-driven construction accepts.
pub const MAX_LIMIT: u64 = u32::MAX as u64 - 1;

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("{q}^(1/{e}) is exactly a half-integer")]
    Tie { q: Integer, e: RationalExponent },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Real(#[from] BigRealError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

pub type Result<T> = std::result::Result<T, TreeError>;

/// `round(q^(1/e))`, decided by interval arithmetic.
pub fn parent(q: &Integer, e: RationalExponent) -> Result<Integer> {
    parent_with(&PrecisionPolicy::default(), q, e)
}

pub fn parent_with(policy: &PrecisionPolicy, q: &Integer, e: RationalExponent) -> Result<Integer> {
    if *q < 2 {
        return Err(TreeError::Invalid(format!("parent needs q >= 2, got {q}")));
    }
    let mut tie = false;
    let start = (q.significant_bits() + 64).max(policy.start_bits);
    let m = escalate(&policy.starting_at(start), "parent", |bits| {
        let x = RealInterval::from_integer(q, bits)?.pow_rational_inverse(e)?;
        match x.round_nearest() {
            Ok(Decision::Undecided) if is_exact_tie(q, e, &x) => {
                tie = true;
                Ok(Decision::Decided(Integer::new()))
            }
            other => other,
        }
    })?;
    if tie {
        return Err(TreeError::Tie { q: q.clone(), e });
    }
    Ok(m)
}

/// Whether the odd integer `t` inside `2x` satisfies `t^p = 2^p q^d`,
/// i.e. `q^(d/p)` is exactly `t/2`. Never true for integer `q`, where a
/// rational root is an integer; kept so a tie cannot loop the escalation.
fn is_exact_tie(q: &Integer, e: RationalExponent, x: &RealInterval) -> bool {
    let t = x.hi().mul_pow2(1).floor();
    if t.is_even() || x.lo().mul_pow2(1).ceil() > t {
        return false;
    }
    let lhs = t.pow(e.num());
    let rhs = q.clone().pow(e.den()) << e.num();
    lhs == rhs
}

/// Structured form of a forest, integers as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestRecord {
    pub exponent: RationalExponent,
    pub limit: u64,
    #[serde(with = "edge_text")]
    pub edges: Vec<(u64, u64)>,
    #[serde(with = "integer_list")]
    pub roots: Vec<Integer>,
}

mod edge_text {
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(u64, u64)], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<[String; 2]> = v.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(u64, u64)>, D::Error> {
        Vec::<[String; 2]>::deserialize(d)?
            .iter()
            .map(|[a, b]| Ok((a.parse().map_err(D::Error::custom)?, b.parse().map_err(D::Error::custom)?)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeForest {
    pub exponent: RationalExponent,
    pub limit: u64,
    /// Parent integer of every prime up to the limit.
    pub parent_of: BTreeMap<u64, u64>,
    /// Primes whose parent is not a smaller prime, ascending.
    pub roots: Vec<u64>,
    /// `(parent, child)`, ascending by child.
    pub edges: Vec<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestStats {
    pub root_count: usize,
    pub max_depth: usize,
    /// Size of the tree under each root.
    pub tree_sizes: BTreeMap<u64, usize>,
    /// Primes not reached from any root.
    pub orphan_count: usize,
}

/// The forest over all primes up to `limit`.
pub fn build_forest(limit: u64, e: RationalExponent) -> Result<PrimeForest> {
    if limit > MAX_LIMIT {
        return Err(TreeError::Invalid(format!("limit above {MAX_LIMIT}")));
    }
    let primes = primes_below(limit as u32 + 1);
    let parents: Vec<u64> = primes
        .par_iter()
        .map(|&q| {
            let m = parent(&Integer::from(q), e)?;
            Ok(m.to_u64().expect("parent below the child"))
        })
        .collect::<Result<_>>()?;
    let is_prime = |n: u64| primes.binary_search(&(n as u32)).is_ok();
    let mut forest = PrimeForest {
        exponent: e,
        limit,
        parent_of: BTreeMap::new(),
        roots: Vec::new(),
        edges: Vec::new(),
    };
    for (&q, &m) in primes.iter().zip(&parents) {
        let q = u64::from(q);
        forest.parent_of.insert(q, m);
        if m < q && is_prime(m) {
            forest.edges.push((m, q));
        } else {
            forest.roots.push(q);
        }
    }
    Ok(forest)
}

impl PrimeForest {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.parent_of.keys().copied()
    }

    /// Parent prime of `q`, or `None` for roots and unknown primes.
    pub fn parent_prime(&self, q: u64) -> Option<u64> {
        let m = *self.parent_of.get(&q)?;
        (m < q && self.parent_of.contains_key(&m)).then_some(m)
    }

    /// Children of `p` in the forest.
    pub fn children(&self, p: u64) -> Vec<u64> {
        let start = self.edges.partition_point(|&(_, c)| c <= p);
        self.edges[start..].iter().filter(|&&(a, _)| a == p).map(|&(_, c)| c).collect()
    }

    /// Children of `p` found forward, as the primes in its nearest-rounding
    /// window `[ceil((p - 1/2)^e), floor((p + 1/2)^e)]` up to the limit.
    pub fn children_by_window(&self, engine: &Engine, p: u64) -> Result<Vec<u64>> {
        let w = engine.feasible_window(&Integer::from(p), self.exponent, Rounding::Nearest)?;
        let lo = w.lo().to_u64().unwrap_or(u64::MAX).max(p + 1);
        let hi = w.last().to_u64().unwrap_or(u64::MAX).min(self.limit);
        Ok(self.parent_of.range(lo..=hi.max(lo)).map(|(&q, _)| q).filter(|&q| q <= hi).collect())
    }

    /// Root of the tree holding `q`.
    pub fn root_of(&self, mut q: u64) -> Option<u64> {
        if !self.parent_of.contains_key(&q) {
            return None;
        }
        while let Some(p) = self.parent_prime(q) {
            q = p;
        }
        Some(q)
    }

    /// `q` and its ancestors, ending at its root.
    pub fn ancestors(&self, mut q: u64) -> Vec<u64> {
        let mut out = vec![q];
        while let Some(p) = self.parent_prime(q) {
            out.push(p);
            q = p;
        }
        out
    }

    pub fn stats(&self) -> ForestStats {
        forest_stats(self)
    }

    pub fn record(&self) -> ForestRecord {
        ForestRecord {
            exponent: self.exponent,
            limit: self.limit,
            edges: self.edges.clone(),
            roots: self.roots.iter().map(|&r| Integer::from(r)).collect(),
        }
    }
}

pub fn forest_stats(f: &PrimeForest) -> ForestStats {
    // Parents are smaller than children, so one ascending pass suffices.
    let mut depth: BTreeMap<u64, (usize, u64)> = BTreeMap::new();
    let mut orphan_count = 0;
    for q in f.primes() {
        let entry = match f.parent_prime(q) {
            Some(p) => match depth.get(&p) {
                Some(&(d, root)) => Some((d + 1, root)),
                None => None,
            },
            None => Some((0, q)),
        };
        match entry {
            Some(e) => {
                depth.insert(q, e);
            }
            None => orphan_count += 1,
        }
    }
    let mut tree_sizes = BTreeMap::new();
    for &(_, root) in depth.values() {
        *tree_sizes.entry(root).or_insert(0) += 1;
    }
    ForestStats {
        root_count: f.roots.len(),
        max_depth: depth.values().map(|&(d, _)| d).max().unwrap_or(0),
        tree_sizes,
        orphan_count,
    }
}

/// DOT digraph with one `tree_<root>` subgraph per tree, in ascending order.
pub fn export_dot(f: &PrimeForest) -> String {
    let mut members: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for q in f.primes() {
        if let Some(root) = f.root_of(q) {
            members.entry(root).or_default().push(q);
        }
    }
    let mut out = String::from("digraph forest {\n");
    for (root, nodes) in &members {
        writeln!(out, "  subgraph tree_{root} {{").unwrap();
        for q in nodes {
            writeln!(out, "    {q};").unwrap();
        }
        for q in nodes {
            if let Some(p) = f.parent_prime(*q) {
                writeln!(out, "    {p} -> {q};").unwrap();
            }
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}
