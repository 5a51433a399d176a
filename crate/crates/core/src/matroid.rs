//! Leveled structure for one fixed guess of `MAX = max_e f({e})` under a
//! matroid constraint.
//!
//! An element promotes level `L_l` when its marginal gain over `I'_l` lies in
//! `[ε/(10k)·MAX, MAX]` and either `I_l + e` stays independent, or the
//! lightest element `ê` whose removal restores independence satisfies
//! `2·w(ê) <= gain`, in which case `ê` is swapped out.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::invariants::{Invariant, InvariantReport};
use crate::leveled::{LevelRule, LeveledStructure, OracleHandles};
use crate::oracle::{MatroidOracle, SubmodularOracle};

/// Objective and independence handles billed together.
#[derive(Debug, Clone)]
pub struct MatroidHandles {
    pub f: SubmodularOracle,
    pub m: MatroidOracle,
}

impl MatroidHandles {
    pub fn new(f: &SubmodularOracle, m: &MatroidOracle) -> Self {
        MatroidHandles {
            f: f.handle(),
            m: m.handle(),
        }
    }
}

impl OracleHandles for MatroidHandles {
    fn fresh(&self) -> Self {
        MatroidHandles::new(&self.f, &self.m)
    }

    fn queries(&self) -> u64 {
        self.f.queries() + self.m.queries()
    }

    fn function(&self) -> &SubmodularOracle {
        &self.f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromoteResult {
    Fail,
    /// `I + e` is independent.
    Free,
    /// `I + e - ê` is independent and `ê` is light enough to be replaced.
    Swap(ElementId),
}

impl PromoteResult {
    pub fn is_fail(&self) -> bool {
        matches!(self, PromoteResult::Fail)
    }

    pub fn swapped(&self) -> Option<ElementId> {
        match self {
            PromoteResult::Swap(e) => Some(*e),
            _ => None,
        }
    }
}

/// `(I_i, I'_i, f(I'_i), w[I_i])`
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatroidState {
    pub independent: ElementSet,
    pub union: ElementSet,
    pub union_value: f64,
    pub weights: BTreeMap<ElementId, f64>,
}

impl MatroidState {
    pub fn weight(&self, e: ElementId) -> Option<f64> {
        self.weights.get(&e).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatroidAccept {
    pub outcome: PromoteResult,
    /// `f(I' + e) - f(I')`, which becomes `w(e)`.
    pub gain: f64,
    /// `f(I' + e)`
    pub value_with: f64,
}

#[derive(Debug, Clone)]
pub struct MatroidRule {
    max_guess: f64,
    epsilon: f64,
    rank: usize,
    tol: f64,
}

impl MatroidRule {
    pub fn new(max_guess: f64, epsilon: f64, rank: usize) -> Result<Self> {
        if !(max_guess.is_finite() && max_guess > 0.0) {
            return Err(Error::Validation(format!(
                "MAX guess must be positive, got {max_guess}"
            )));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Validation(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        if rank == 0 {
            return Err(Error::Validation("matroid rank must be positive".into()));
        }
        Ok(MatroidRule {
            max_guess,
            epsilon,
            rank,
            tol: 0.0,
        })
    }

    /// Absolute tolerance on every threshold comparison.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_guess(&self) -> f64 {
        self.max_guess
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `ε/(10k)·MAX`, the smallest admissible marginal gain.
    pub fn threshold(&self) -> f64 {
        admission_threshold(self.epsilon, self.rank, self.max_guess)
    }

    /// Promote against `(I, I', w[I])` with `f(I')` supplied by the caller,
    /// so the objective costs one query. The independence tests cost one
    /// query plus `⌈log₂(|I|+1)⌉` when a swap has to be found.
    pub fn promote_with(
        &self,
        oracles: &MatroidHandles,
        independent: &ElementSet,
        union: &ElementSet,
        union_value: f64,
        weights: &BTreeMap<ElementId, f64>,
        e: ElementId,
    ) -> Result<MatroidAccept> {
        if union.contains(e) {
            return Err(Error::Precondition(format!("{e} already belongs to I'")));
        }
        let value_with = oracles.f.evaluate(&union.with(e))?;
        let gain = value_with - union_value;
        let fail = MatroidAccept {
            outcome: PromoteResult::Fail,
            gain,
            value_with,
        };
        if gain < self.threshold() - self.tol || gain > self.max_guess + self.tol {
            return Ok(fail);
        }
        if oracles.m.is_independent(&independent.with(e)) {
            return Ok(MatroidAccept {
                outcome: PromoteResult::Free,
                ..fail
            });
        }
        let weight = |x: ElementId| weights.get(&x).copied().unwrap_or(f64::INFINITY);
        match min_swap_in_dependent(&oracles.m, independent, e, weight) {
            Some(hat) if 2.0 * weight(hat) <= gain + self.tol => Ok(MatroidAccept {
                outcome: PromoteResult::Swap(hat),
                ..fail
            }),
            _ => Ok(fail),
        }
    }
}

/// Admission threshold shared with the guess router so both sides agree bit
/// for bit.
pub(crate) fn admission_threshold(epsilon: f64, rank: usize, max_guess: f64) -> f64 {
    epsilon / (10.0 * rank as f64) * max_guess
}

/// The lightest `ê ∈ I` with `I + e - ê` independent, given that `I` is
/// independent and `I + e` is not. `None` when `e` is a loop.
///
/// Sorting `I + e` by decreasing weight (with `e` first), the answer is the
/// last element of the shortest dependent prefix, so a binary search over
/// prefix lengths needs `⌈log₂(|I|+1)⌉` independence queries. Equal weights
/// resolve to the smallest id.
pub fn find_min_circuit_swap<W: Fn(ElementId) -> f64>(
    m: &MatroidOracle,
    independent: &ElementSet,
    e: ElementId,
    weight: W,
) -> Result<Option<ElementId>> {
    if independent.contains(e) {
        return Err(Error::Precondition(format!("{e} is already in I")));
    }
    if m.is_independent(&independent.with(e)) {
        return Err(Error::Precondition(format!(
            "I + {e} is independent; nothing to swap"
        )));
    }
    Ok(min_swap_in_dependent(m, independent, e, weight))
}

fn min_swap_in_dependent<W: Fn(ElementId) -> f64>(
    m: &MatroidOracle,
    independent: &ElementSet,
    e: ElementId,
    weight: W,
) -> Option<ElementId> {
    let mut order: Vec<(f64, ElementId)> = independent.iter().map(|x| (weight(x), x)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)));
    let order: Vec<ElementId> = std::iter::once(e)
        .chain(order.into_iter().map(|(_, x)| x))
        .collect();

    // Shortest dependent prefix; the full list is known to be dependent.
    let (mut lo, mut hi) = (1, order.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        let prefix: ElementSet = order[..mid].iter().copied().collect();
        if m.is_independent(&prefix) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let hat = order[lo - 1];
    (hat != e).then_some(hat)
}

impl LevelRule for MatroidRule {
    type Oracles = MatroidHandles;
    type State = MatroidState;
    type Accept = MatroidAccept;

    const STEP_INVARIANTS: &'static [Invariant] = &[Invariant::Weight, Invariant::Independent];

    fn empty_state(&self) -> MatroidState {
        MatroidState::default()
    }

    fn is_empty_state(&self, state: &MatroidState) -> bool {
        state.independent.is_empty() && state.union.is_empty() && state.weights.is_empty()
    }

    fn promote(
        &self,
        oracles: &MatroidHandles,
        state: &MatroidState,
        e: ElementId,
    ) -> Result<Option<MatroidAccept>> {
        let accept = self.promote_with(
            oracles,
            &state.independent,
            &state.union,
            state.union_value,
            &state.weights,
            e,
        )?;
        Ok((!accept.outcome.is_fail()).then_some(accept))
    }

    fn advance(&self, state: &MatroidState, e: ElementId, accept: &MatroidAccept) -> MatroidState {
        let mut next = state.clone();
        if let Some(out) = accept.outcome.swapped() {
            next.independent.remove(out);
            next.weights.remove(&out);
        }
        next.independent.insert(e);
        next.weights.insert(e, accept.gain);
        next.union.insert(e);
        next.union_value = accept.value_with;
        next
    }

    fn solution_set<'a>(&self, state: &'a MatroidState) -> &'a ElementSet {
        &state.independent
    }

    fn cached_solution_value(&self, _state: &MatroidState) -> Option<f64> {
        None
    }

    fn refresh(&self, oracles: &MatroidHandles, state: &MatroidState) -> Result<MatroidState> {
        let mut fresh = state.clone();
        fresh.union_value = oracles.f.evaluate(&state.union)?;
        Ok(fresh)
    }

    fn cache_matches(&self, stored: &MatroidState, fresh: &MatroidState) -> bool {
        (stored.union_value - fresh.union_value).abs() <= self.tol
    }

    fn check_step(
        &self,
        audit: &MatroidHandles,
        level: usize,
        prev: &MatroidState,
        chosen: ElementId,
        next: &MatroidState,
        report: &mut InvariantReport,
    ) -> Result<()> {
        if prev.union.contains(chosen) {
            report.fail(
                Invariant::Independent,
                level,
                format!("e_{level} = {chosen} already in I'_{}", level - 1),
            );
            return Ok(());
        }
        let accept = self.promote_with(
            audit,
            &prev.independent,
            &prev.union,
            prev.union_value,
            &prev.weights,
            chosen,
        )?;
        if accept.outcome.is_fail() {
            report.fail(
                Invariant::Independent,
                level,
                format!("e_{level} = {chosen} does not promote L_{}", level - 1),
            );
            return Ok(());
        }

        let mut expected_i = prev.independent.with(chosen);
        if let Some(out) = accept.outcome.swapped() {
            expected_i.remove(out);
        }
        if next.independent != expected_i {
            report.fail(
                Invariant::Independent,
                level,
                format!("I_{level} = {} but expected {expected_i}", next.independent),
            );
        }
        if !audit.m.is_independent(&next.independent) {
            report.fail(
                Invariant::Independent,
                level,
                format!("I_{level} = {} is dependent", next.independent),
            );
        }
        let expected_union = prev.union.union(&next.independent);
        if next.union != expected_union {
            report.fail(
                Invariant::Independent,
                level,
                format!(
                    "I'_{level} = {} but the union of I_1..I_{level} is {expected_union}",
                    next.union
                ),
            );
        }

        match next.weight(chosen) {
            Some(w) if (w - accept.gain).abs() <= self.tol => {}
            other => report.fail(
                Invariant::Weight,
                level,
                format!(
                    "w({chosen}) = {other:?} but its gain over I'_{} is {}",
                    level - 1,
                    accept.gain
                ),
            ),
        }
        let keys: ElementSet = next.weights.keys().copied().collect();
        if keys != next.independent {
            report.fail(
                Invariant::Weight,
                level,
                format!(
                    "weights kept for {keys} but I_{level} = {}",
                    next.independent
                ),
            );
        }
        if let Some((x, _)) = next
            .weights
            .iter()
            .find(|(&x, &w)| x != chosen && prev.weight(x) != Some(w))
        {
            report.fail(
                Invariant::Weight,
                level,
                format!("weight of {x} changed after it was fixed"),
            );
        }
        if let Some((x, w)) = next
            .weights
            .iter()
            .find(|(_, &w)| w < self.threshold() - self.tol || w > self.max_guess + self.tol)
        {
            report.fail(
                Invariant::Weight,
                level,
                format!("w({x}) = {w} outside the admission interval"),
            );
        }
        if let Some(out) = accept.outcome.swapped() {
            let replaced = prev.weight(out).unwrap_or(f64::INFINITY);
            if 2.0 * replaced > accept.gain + self.tol {
                report.fail(
                    Invariant::Weight,
                    level,
                    format!("{chosen} replaced {out} without doubling its weight"),
                );
            }
        }
        Ok(())
    }

    /// `k·(log₂(k/ε) + 4)`: at most `k` replacement chains, each at most
    /// `log₂(k/ε) + 4` long because weights double along a chain inside
    /// `[ε/(10k)·MAX, MAX]`.
    fn level_bound(&self) -> usize {
        let k = self.rank as f64;
        (k * ((k / self.epsilon).log2() + 4.0)).floor() as usize
    }
}

pub type MatroidInstance = LeveledStructure<MatroidRule>;

impl MatroidInstance {
    pub fn for_guess(
        f: &SubmodularOracle,
        m: &MatroidOracle,
        max_guess: f64,
        epsilon: f64,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        let rule = MatroidRule::new(max_guess, epsilon, m.rank())?;
        Ok(LeveledStructure::new(rule, MatroidHandles::new(f, m), rng))
    }
}
