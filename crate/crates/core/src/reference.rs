//! Offline baselines: exact optimum by enumeration and the classic greedy
//! algorithms. Each one runs on fresh oracle handles and reports what it
//! spent.

use serde::Serialize;

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::oracle::{MatroidOracle, SubmodularOracle};

/// Largest ground set `brute_force_opt` accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy)]
pub enum Feasibility<'a> {
    Cardinality(usize),
    Matroid(&'a MatroidOracle),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineResult {
    pub set: ElementSet,
    pub value: f64,
    pub queries_used: u64,
}

struct Checker {
    k: Option<usize>,
    m: Option<MatroidOracle>,
}

impl Checker {
    fn new(c: Feasibility<'_>) -> Self {
        match c {
            Feasibility::Cardinality(k) => Checker {
                k: Some(k),
                m: None,
            },
            Feasibility::Matroid(m) => Checker {
                k: None,
                m: Some(m.handle()),
            },
        }
    }

    fn feasible(&self, set: &ElementSet) -> bool {
        match (&self.m, self.k) {
            (Some(m), _) => m.is_independent(set),
            (None, Some(k)) => set.len() <= k,
            (None, None) => true,
        }
    }

    fn queries(&self) -> u64 {
        self.m.as_ref().map_or(0, |m| m.queries())
    }
}

/// Exact maximizer over all feasible subsets of `ground`. Feasible families
/// are downward closed, so enumeration prunes at the first infeasible set.
/// Ties keep the lexicographically first set.
pub fn brute_force_opt(
    ground: &ElementSet,
    f: &SubmodularOracle,
    c: Feasibility<'_>,
) -> Result<BaselineResult> {
    if ground.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n: ground.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let f = f.handle();
    let checker = Checker::new(c);
    let items: Vec<ElementId> = ground.iter().collect();
    let mut best = (ElementSet::new(), 0.0);
    let mut current = ElementSet::new();
    search(&items, 0, &mut current, &f, &checker, &mut best)?;
    Ok(BaselineResult {
        set: best.0,
        value: best.1,
        queries_used: f.queries() + checker.queries(),
    })
}

fn search(
    items: &[ElementId],
    from: usize,
    current: &mut ElementSet,
    f: &SubmodularOracle,
    checker: &Checker,
    best: &mut (ElementSet, f64),
) -> Result<()> {
    for idx in from..items.len() {
        current.insert(items[idx]);
        if checker.feasible(current) {
            let v = f.evaluate(current)?;
            if v > best.1 {
                *best = (current.clone(), v);
            }
            search(items, idx + 1, current, f, checker, best)?;
        }
        current.remove(items[idx]);
    }
    Ok(())
}

/// Repeatedly adds the feasible element of largest positive marginal gain,
/// smallest id on ties, until none is left.
fn greedy(ground: &ElementSet, f: &SubmodularOracle, c: Feasibility<'_>) -> Result<BaselineResult> {
    let f = f.handle();
    let checker = Checker::new(c);
    let mut set = ElementSet::new();
    let mut value = 0.0;
    let mut remaining: Vec<ElementId> = ground.iter().collect();
    loop {
        let mut pick: Option<(usize, f64)> = None;
        let mut blocked = Vec::new();
        for (idx, &e) in remaining.iter().enumerate() {
            let with = set.with(e);
            if !checker.feasible(&with) {
                blocked.push(idx);
                continue;
            }
            let gain = f.evaluate(&with)? - value;
            if gain > 0.0 && pick.is_none_or(|(_, g)| gain > g) {
                pick = Some((idx, gain));
            }
        }
        let Some((idx, gain)) = pick else { break };
        set.insert(remaining[idx]);
        value += gain;
        // Infeasible now means infeasible for every superset.
        blocked.push(idx);
        blocked.sort_unstable();
        for &b in blocked.iter().rev() {
            remaining.remove(b);
        }
    }
    let value = if set.is_empty() {
        0.0
    } else {
        f.evaluate(&set)?
    };
    Ok(BaselineResult {
        set,
        value,
        queries_used: f.queries() + checker.queries(),
    })
}

/// Greedy under `|S| <= k`; at least `(1 - 1/e)·OPT` for monotone submodular
/// `f`.
pub fn greedy_cardinality(
    ground: &ElementSet,
    f: &SubmodularOracle,
    k: usize,
) -> Result<BaselineResult> {
    greedy(ground, f, Feasibility::Cardinality(k))
}

/// Greedy over the independent sets of `m`; at least `OPT/2`.
pub fn greedy_matroid(
    ground: &ElementSet,
    f: &SubmodularOracle,
    m: &MatroidOracle,
) -> Result<BaselineResult> {
    greedy(ground, f, Feasibility::Matroid(m))
}

pub fn greedy_baseline(
    ground: &ElementSet,
    f: &SubmodularOracle,
    c: Feasibility<'_>,
) -> Result<BaselineResult> {
    greedy(ground, f, c)
}
