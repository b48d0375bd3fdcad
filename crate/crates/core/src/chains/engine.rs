use super::live::{bits_for, boundary_log2, compare, image, reach_hi, reach_lo, Boundary, LiveSet, Value};
use super::{ChainError, GrowthRule, Policy, PrimeChain, Result, Rounding};
use crate::bigreal::{escalate, BigRealError, Decision, Dyadic, PrecisionPolicy, RationalExponent};
use crate::primality::{PrimalityError, PrimeTester, SearchWindow};
use rug::Integer;
use std::cmp::Ordering;

const GUARD_BITS: u32 = 64;

/// Window sizes up to which [`FeasibilityReport`] counts primes.
const COUNT_LIMIT: u32 = 1 << 16;

/// Primality battery and precision budget shared by chain operations.
#[derive(Clone, Debug, Default)]
pub struct Engine {
    pub tester: PrimeTester,
    pub precision: PrecisionPolicy,
}

/// The next-step window of a chain and what it holds.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityReport {
    /// `None` when no integer is reachable.
    pub window: Option<SearchWindow>,
    /// The prime the chain's policy would append.
    pub found: Option<Integer>,
    /// Width of the real image `f([s - 1/2, s + 1/2))` of the head's strip.
    pub window_width: f64,
    /// Number of probable primes in the window, for windows up to 65536 wide.
    pub candidate_count: Option<u64>,
}

impl Engine {
    pub fn new(tester: PrimeTester, precision: PrecisionPolicy) -> Engine {
        Engine { tester, precision }
    }

    pub(crate) fn decide<T>(
        &self,
        start_bits: u32,
        what: &str,
        mut attempt: impl FnMut(u32) -> Result<Decision<T>>,
    ) -> Result<T> {
        let policy = self.precision.starting_at(start_bits);
        let mut inner: Option<ChainError> = None;
        let out = escalate(&policy, what, |bits| match attempt(bits) {
            Ok(d) => Ok(d),
            Err(ChainError::Real(e)) => Err(e),
            Err(e) => {
                inner = Some(e);
                Err(BigRealError::Domain("aborted"))
            }
        });
        match (out, inner) {
            (_, Some(e)) => Err(e),
            (Ok(v), None) => Ok(v),
            (Err(e), None) => Err(e.into()),
        }
    }

    /// Integers reachable from the head's rounding strip, rounded inward:
    /// `[ceil((s - 1/2)^e), floor((s + 1/2)^e)]` for nearest rounding,
    /// `[ceil(s^e), floor((s + 1)^e)]` for floor rounding.
    pub fn feasible_window(&self, s: &Integer, e: RationalExponent, rounding: Rounding) -> Result<SearchWindow> {
        if *s < 2 {
            return Err(ChainError::Invalid("feasible window needs s >= 2".into()));
        }
        let lo_end = match rounding {
            Rounding::Nearest => rounding.strip_lo(s),
            Rounding::Floor => Dyadic::from(s),
        };
        let hi_end = rounding.strip_hi(s);
        let log2 = hi_end.log2_approx() * e.to_f64();
        let start = bits_for(log2, GUARD_BITS);
        let rule = GrowthRule::Power {
            exponent: e,
            rounding,
        };
        let one_step = |x: &Dyadic, bits: u32| -> Result<Value> {
            if e.is_identity() {
                return Ok(Value::Exact(x.clone()));
            }
            image(&rule, x, 1, bits)
        };
        let lo = self.decide(start, "feasible window lower end", |bits| {
            Ok(one_step(&lo_end, bits)?.ceil())
        })?;
        let hi = self.decide(start, "feasible window upper end", |bits| {
            let v = one_step(&hi_end, bits)?;
            Ok(match v {
                Value::Exact(d) => Decision::Decided(d.floor()),
                Value::Approx(x) => x.floor_of(),
            })
        })?;
        SearchWindow::inclusive(lo, hi)
            .ok_or_else(|| ChainError::Invalid(format!("feasible window of {s} under {e} is empty")))
    }

    fn boundary_at(&self, rule: &GrowthRule, b: &Boundary, level: u64) -> u32 {
        bits_for(boundary_log2(rule, b, level), GUARD_BITS + 4 * (level - b.level) as u32)
    }

    /// Integers at `live.level + 1` whose strips meet the image of the live set.
    fn reachable(&self, rule: &GrowthRule, live: &LiveSet) -> Result<Option<SearchWindow>> {
        let next = live.level + 1;
        let rounding = rule.rounding();
        let lo = self.decide(self.boundary_at(rule, &live.lo, next), "window lower end", |bits| {
            Ok(reach_lo(rounding, &image(rule, &live.lo.origin, next - live.lo.level, bits)?))
        })?;
        let hi = self.decide(self.boundary_at(rule, &live.hi, next), "window upper end", |bits| {
            Ok(reach_hi(rounding, &image(rule, &live.hi.origin, next - live.hi.level, bits)?))
        })?;
        Ok(SearchWindow::inclusive(lo, hi))
    }

    /// Narrows the live set by the prime `p` at the next level.
    fn advance(&self, rule: &GrowthRule, live: &LiveSet, p: &Integer) -> Result<LiveSet> {
        let next = live.level + 1;
        let rounding = rule.rounding();
        let strip_lo = rounding.strip_lo(p);
        let strip_hi = rounding.strip_hi(p);
        let cmp_at = |b: &Boundary, d: &Dyadic, what: &str| {
            self.decide(self.boundary_at(rule, b, next), what, |bits| {
                Ok(compare(&image(rule, &b.origin, next - b.level, bits)?, d))
            })
        };
        let lo = if cmp_at(&live.lo, &strip_lo, "live lower boundary")? == Ordering::Greater {
            live.lo.clone()
        } else {
            Boundary {
                level: next,
                origin: strip_lo,
            }
        };
        let hi = if cmp_at(&live.hi, &strip_hi, "live upper boundary")? == Ordering::Less {
            live.hi.clone()
        } else {
            Boundary {
                level: next,
                origin: strip_hi,
            }
        };
        Ok(LiveSet { level: next, lo, hi })
    }

    fn check_extensible(rule: &GrowthRule) -> Result<()> {
        match rule {
            GrowthRule::Power { .. } | GrowthRule::DigitShift { .. } | GrowthRule::Exp2Tower => Ok(()),
            GrowthRule::ScaledNn { .. } => Err(ChainError::Unsupported(
                "chains under the scaled n^n rule are built by scan_scaled_nn".into(),
            )),
        }
    }

    /// Live set at the head of `chain`; fails when no real orbit rounds to
    /// every listed prime.
    pub(crate) fn live_set(&self, chain: &PrimeChain) -> Result<LiveSet> {
        let rule = chain.rule();
        Self::check_extensible(&rule)?;
        let mut live = LiveSet::of_prime(rule.rounding(), chain.offset(), &chain.primes()[0]);
        for p in &chain.primes()[1..] {
            let ok = self
                .reachable(&rule, &live)?
                .is_some_and(|w| w.contains(p));
            if !ok {
                return Err(ChainError::EmptyIntersection { index: live.level + 1 });
            }
            live = self.advance(&rule, &live, p)?;
        }
        Ok(live)
    }

    /// Integers above `head` that may follow it with the live set `live`:
    /// the reachable set intersected with the feasible window of the head.
    fn window(&self, rule: &GrowthRule, live: &LiveSet, head: &Integer) -> Result<Option<SearchWindow>> {
        let Some(reach) = self.reachable(rule, live)? else {
            return Ok(None);
        };
        let (lo, hi) = match rule {
            GrowthRule::Power { exponent, rounding } => {
                let f = self.feasible_window(head, *exponent, *rounding)?;
                (reach.lo().max(f.lo()).clone(), reach.last().min(f.last()))
            }
            _ => (reach.lo().clone(), reach.last()),
        };
        // Chains strictly increase; small heads can reach themselves.
        let lo = lo.max(Integer::from(head + 1u32));
        Ok(SearchWindow::inclusive(lo, hi))
    }

    /// Window for the prime after the head of `chain`.
    pub fn next_window(&self, chain: &PrimeChain) -> Result<Option<SearchWindow>> {
        let live = self.live_set(chain)?;
        self.window(&chain.rule(), &live, chain.head())
    }

    /// The image of `head` under the rule, the target of both policies.
    fn target(&self, rule: &GrowthRule, head: &Integer, bits: u32) -> Result<Value> {
        image(rule, &Dyadic::from(head), 1, bits)
    }

    fn select(&self, rule: &GrowthRule, policy: Policy, head: &Integer, w: &SearchWindow) -> Result<Option<Integer>> {
        let start = bits_for(rule.grow_log2(f64::from(head.significant_bits())), GUARD_BITS);
        match policy {
            Policy::Nearest => self.decide(start, "nearest prime", |bits| {
                let t = self.target(rule, head, bits)?.to_interval(bits)?;
                match self.tester.nearest_prime(w.lo(), &w.last(), &t) {
                    Ok(c) => Ok(Decision::Decided(c.map(|c| c.value))),
                    Err(PrimalityError::Precision(_)) => Ok(Decision::Undecided),
                    Err(e) => Err(e.into()),
                }
            }),
            Policy::NextAbove => {
                let c = self.decide(start, "ceiling of the target", |bits| {
                    Ok(self.target(rule, head, bits)?.ceil())
                })?;
                let from = c.max(w.lo().clone());
                if let Some(above) = SearchWindow::new(from.clone(), w.hi().clone()).ok() {
                    if let Some(p) = self.tester.first_prime_in_window(&above) {
                        return Ok(Some(p.value));
                    }
                }
                let below_last = Integer::from(&from - 1u32).min(w.last());
                Ok(SearchWindow::inclusive(w.lo().clone(), below_last)
                    .and_then(|below| self.tester.last_prime_in_window(&below))
                    .map(|p| p.value))
            }
        }
    }

    /// Appends `steps` primes, each chosen by the chain's policy inside the
    /// window reachable from the chain so far.
    pub fn extend_chain(&self, chain: &PrimeChain, steps: usize) -> Result<PrimeChain> {
        match self.extend_until(chain, steps)? {
            (out, None) => Ok(out),
            (_, Some(stop)) => Err(stop),
        }
    }

    /// As [`extend_chain`](Self::extend_chain), but keeps what was built
    /// before an infeasible step and returns that step's error beside it.
    pub(crate) fn extend_until(&self, chain: &PrimeChain, steps: usize) -> Result<(PrimeChain, Option<ChainError>)> {
        let rule = chain.rule();
        let mut live = self.live_set(chain)?;
        let mut out = chain.clone();
        for _ in 0..steps {
            let window = self.window(&rule, &live, out.head())?;
            let found = match &window {
                Some(w) => self.select(&rule, chain.policy(), out.head(), w)?,
                None => None,
            };
            let Some(p) = found else {
                let stop = ChainError::Infeasible {
                    step: live.level + 1,
                    window,
                };
                return Ok((out, Some(stop)));
            };
            live = self.advance(&rule, &live, &p)?;
            out = out.pushed(p);
        }
        Ok((out, None))
    }

    /// Every probable prime that may follow the head, ascending; used for
    /// alternative moves during search. Windows wider than `cap` are sampled
    /// from their low end.
    pub fn alternatives(&self, chain: &PrimeChain, cap: usize) -> Result<Vec<Integer>> {
        let Some(w) = self.next_window(chain)? else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        let mut lo = w.lo().clone();
        while out.len() < cap {
            let Ok(rest) = SearchWindow::new(lo.clone(), w.hi().clone()) else {
                break;
            };
            match self.tester.first_prime_in_window(&rest) {
                Some(p) => {
                    lo = Integer::from(&p.value + 1u32);
                    out.push(p.value);
                }
                None => break,
            }
        }
        Ok(out)
    }

    /// Checks primality of every element and that some seed realizes the
    /// chain with each prime inside its predecessor's window.
    pub fn validate(&self, chain: &PrimeChain) -> Result<()> {
        for (i, p) in chain.indexed() {
            let c = self.tester.test(&p);
            if !c.is_prime_like() {
                return Err(ChainError::Invalid(format!("term {i} = {p} is {}", c.status)));
            }
        }
        if let GrowthRule::Power { exponent, rounding } = chain.rule() {
            for (i, w) in chain.primes().windows(2).enumerate() {
                if !self.feasible_window(&w[0], exponent, rounding)?.contains(&w[1]) {
                    return Err(ChainError::Invalid(format!(
                        "term {} = {} lies outside the window of {}",
                        chain.offset() + i as u64 + 1,
                        w[1],
                        w[0]
                    )));
                }
            }
        }
        self.live_set(chain).map(|_| ())
    }

    /// The next-step window, the prime the policy picks, and how crowded
    /// the window is.
    pub fn feasibility_report(&self, chain: &PrimeChain) -> Result<FeasibilityReport> {
        let rule = chain.rule();
        let live = self.live_set(chain)?;
        let head = chain.head();
        let window = self.window(&rule, &live, head)?;
        let found = match &window {
            Some(w) => self.select(&rule, chain.policy(), head, w)?,
            None => None,
        };
        let rounding = rule.rounding();
        let bits = bits_for(rule.grow_log2(f64::from(head.significant_bits())), GUARD_BITS);
        let a = image(&rule, &rounding.strip_lo(head), 1, bits)?.to_interval(bits)?;
        let b = image(&rule, &rounding.strip_hi(head), 1, bits)?.to_interval(bits)?;
        let window_width = b.sub(&a).midpoint().to_f64();
        let candidate_count = window.as_ref().and_then(|w| {
            (w.len() <= COUNT_LIMIT).then(|| self.tester.primes_in_window(w).len() as u64)
        });
        Ok(FeasibilityReport {
            window,
            found,
            window_width,
            candidate_count,
        })
    }
}
