//! The randomized leveled structure shared by the matroid and cardinality
//! variants.
//!
//! Level `L_i` holds a survivor pool `R_i`, the element `e_i` sampled from it
//! and the partial solution reached after accepting `e_i`. What "promoting"
//! means and how a partial solution advances are supplied by a
//! [`LevelRule`]; construction, updates, placement by binary search and the
//! first-principles audit live here once for both constraints.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::invariants::{Invariant, InvariantReport};
use crate::oracle::SubmodularOracle;
use crate::random_set::RandomSet;

/// The oracle handles a rule needs. Each instance owns three copies: one for
/// maintenance, one for audits and one for reporting.
pub trait OracleHandles: Clone + Send + fmt::Debug {
    /// Same underlying oracles, zeroed counters.
    fn fresh(&self) -> Self;

    fn queries(&self) -> u64;

    fn function(&self) -> &SubmodularOracle;
}

impl OracleHandles for SubmodularOracle {
    fn fresh(&self) -> Self {
        self.handle()
    }

    fn queries(&self) -> u64 {
        SubmodularOracle::queries(self)
    }

    fn function(&self) -> &SubmodularOracle {
        self
    }
}

pub trait LevelRule: Clone + Send + fmt::Debug {
    type Oracles: OracleHandles;
    /// Partial solution at one level, including cached objective values.
    type State: Clone + Send + fmt::Debug;
    /// Witness of a successful promotion.
    type Accept: Clone + fmt::Debug;

    /// Invariant under which `e_i ∈ R_i` and the per-level update are reported.
    const STEP_INVARIANTS: &'static [Invariant];

    fn empty_state(&self) -> Self::State;

    fn is_empty_state(&self, state: &Self::State) -> bool;

    /// `None` when `e` does not promote the level whose state is given.
    fn promote(
        &self,
        oracles: &Self::Oracles,
        state: &Self::State,
        e: ElementId,
    ) -> Result<Option<Self::Accept>>;

    fn advance(&self, state: &Self::State, e: ElementId, accept: &Self::Accept) -> Self::State;

    /// The reported set of a level (`I_i`).
    fn solution_set<'a>(&self, state: &'a Self::State) -> &'a ElementSet;

    /// `f(I_i)` when the state already holds it.
    fn cached_solution_value(&self, state: &Self::State) -> Option<f64>;

    /// Re-evaluates every cached objective value of `state`.
    fn refresh(&self, oracles: &Self::Oracles, state: &Self::State) -> Result<Self::State>;

    /// `true` when the cached values of `stored` agree with `fresh`.
    fn cache_matches(&self, stored: &Self::State, fresh: &Self::State) -> bool;

    /// Audits the transition `prev --e_i--> next` at level `level`.
    fn check_step(
        &self,
        audit: &Self::Oracles,
        level: usize,
        prev: &Self::State,
        chosen: ElementId,
        next: &Self::State,
        report: &mut InvariantReport,
    ) -> Result<()>;

    /// Upper bound on `T` guaranteed by the rule.
    fn level_bound(&self) -> usize;
}

#[derive(Debug, Clone)]
struct Step<S> {
    chosen: Option<ElementId>,
    state: S,
}

/// Counts of binary-search placements cross-checked against a linear scan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlacementAudit {
    pub checked: u64,
    pub mismatches: u64,
}

#[derive(Debug, Clone)]
pub struct LeveledStructure<R: LevelRule> {
    rule: R,
    oracles: R::Oracles,
    audit: R::Oracles,
    report: SubmodularOracle,
    rng: ChaCha8Rng,
    /// Elements inserted and not deleted; kept apart from `R_0` so the
    /// starter invariant is a real cross-check.
    alive: BTreeSet<ElementId>,
    /// `R_0 ..= R_{T+1}`.
    survivors: Vec<RandomSet>,
    /// `steps[0]` is `L_0`; `steps[i]` holds `e_i` and the state after it.
    steps: Vec<Step<R::State>>,
    shadow_scan: bool,
    placement: PlacementAudit,
    epoch: u64,
    solution_cache: Option<(u64, f64)>,
}

impl<R: LevelRule> LeveledStructure<R> {
    pub fn new(rule: R, oracles: R::Oracles, rng: ChaCha8Rng) -> Self {
        let audit = oracles.fresh();
        let report = oracles.function().handle();
        let base = rule.empty_state();
        LeveledStructure {
            rule,
            oracles,
            audit,
            report,
            rng,
            alive: BTreeSet::new(),
            survivors: vec![RandomSet::new(), RandomSet::new()],
            steps: vec![Step {
                chosen: None,
                state: base,
            }],
            shadow_scan: false,
            placement: PlacementAudit::default(),
            epoch: 0,
            solution_cache: None,
        }
    }

    /// Cross-check every binary-search placement with a linear scan billed
    /// to the audit handles.
    pub fn with_shadow_scan(mut self, on: bool) -> Self {
        self.shadow_scan = on;
        self
    }

    pub fn rule(&self) -> &R {
        &self.rule
    }

    /// `T`, the index of the last nonempty level.
    pub fn level_count(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn survivors(&self, i: usize) -> Option<&RandomSet> {
        self.survivors.get(i)
    }

    /// `e_i` for `1 <= i <= T`.
    pub fn chosen(&self, i: usize) -> Option<ElementId> {
        self.steps.get(i).and_then(|s| s.chosen)
    }

    pub fn state(&self, i: usize) -> Option<&R::State> {
        self.steps.get(i).map(|s| &s.state)
    }

    pub fn alive(&self) -> &BTreeSet<ElementId> {
        &self.alive
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }

    /// `true` when `e` belongs to some `R_i` with `i >= 1`.
    pub fn in_survivor_pools(&self, e: ElementId) -> bool {
        self.survivors.iter().skip(1).any(|r| r.contains(e))
    }

    pub fn update_queries(&self) -> u64 {
        self.oracles.queries()
    }

    pub fn audit_queries(&self) -> u64 {
        self.audit.queries()
    }

    pub fn report_queries(&self) -> u64 {
        self.report.queries()
    }

    pub fn placement_audit(&self) -> PlacementAudit {
        self.placement
    }

    /// Bumped on every structural change.
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn reseed(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    /// Builds the structure over `elements` from scratch.
    pub fn init<I: IntoIterator<Item = ElementId>>(&mut self, elements: I) -> Result<()> {
        if !self.alive.is_empty() {
            return Err(Error::Precondition("init on a nonempty structure".into()));
        }
        for e in elements {
            if !self.oracles.function().contains(e) {
                return Err(Error::UnknownElement(e));
            }
            if !self.alive.insert(e) {
                return Err(Error::AlreadyAlive(e));
            }
            self.survivors[0].insert(e);
        }
        let mut first = RandomSet::new();
        for &e in self.survivors[0].members() {
            if self
                .rule
                .promote(&self.oracles, &self.steps[0].state, e)?
                .is_some()
            {
                first.insert(e);
            }
        }
        self.survivors[1] = first;
        self.construct_level(1)?;
        Ok(())
    }

    /// Rebuilds levels `i..` from `R_i` in a fresh uniformly random order and
    /// returns the new `T`. Levels below `i` must already be consistent.
    pub fn construct_level(&mut self, i: usize) -> Result<usize> {
        if i == 0 || i > self.steps.len() {
            return Err(Error::Precondition(format!(
                "construct_level({i}) outside 1..={}",
                self.steps.len()
            )));
        }
        self.epoch += 1;
        self.steps.truncate(i);
        self.survivors.truncate(i + 1);

        let mut pool: Vec<ElementId> = self.survivors[i].members().to_vec();
        while !pool.is_empty() {
            let e = pool.swap_remove(self.rng.gen_range(0..pool.len()));
            let top = self.steps.len();
            let z = match self
                .rule
                .promote(&self.oracles, &self.steps[top - 1].state, e)?
            {
                Some(accept) => {
                    let state = self.rule.advance(&self.steps[top - 1].state, e, &accept);
                    self.steps.push(Step {
                        chosen: Some(e),
                        state,
                    });
                    self.survivors.push(RandomSet::new());
                    top
                }
                None if top - 1 < i => i - 1,
                None => self.place(e, i, top - 1)?,
            };
            for r in i + 1..=z {
                self.survivors[r].insert(e);
            }
        }
        Ok(self.level_count())
    }

    /// Lowest `z` in `[lo, hi]` whose level `e` fails to promote; `hi` is
    /// known to fail.
    fn place(&mut self, e: ElementId, lo: usize, hi: usize) -> Result<usize> {
        let (mut a, mut b) = (lo, hi);
        while a < b {
            let mid = (a + b) / 2;
            if self
                .rule
                .promote(&self.oracles, &self.steps[mid].state, e)?
                .is_none()
            {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        if self.shadow_scan {
            let mut linear = hi;
            for z in lo..=hi {
                if self
                    .rule
                    .promote(&self.audit, &self.steps[z].state, e)?
                    .is_none()
                {
                    linear = z;
                    break;
                }
            }
            self.placement.checked += 1;
            if linear != a {
                log::warn!("placement of {e}: binary search gave {a}, linear scan gave {linear}");
                self.placement.mismatches += 1;
            }
        }
        Ok(a)
    }

    pub fn insert(&mut self, v: ElementId) -> Result<()> {
        if !self.oracles.function().contains(v) {
            return Err(Error::UnknownElement(v));
        }
        if !self.alive.insert(v) {
            return Err(Error::AlreadyAlive(v));
        }
        self.epoch += 1;
        self.survivors[0].insert(v);
        let top = self.level_count();
        for i in 1..=top + 1 {
            let Some(accept) = self
                .rule
                .promote(&self.oracles, &self.steps[i - 1].state, v)?
            else {
                break;
            };
            self.survivors[i].insert(v);
            if self.rng.gen_range(0..self.survivors[i].len()) != 0 {
                continue;
            }
            let state = self.rule.advance(&self.steps[i - 1].state, v, &accept);
            self.steps.truncate(i);
            self.survivors.truncate(i + 1);
            self.steps.push(Step {
                chosen: Some(v),
                state,
            });
            let mut next = RandomSet::new();
            for &e in self.survivors[i].members() {
                if e != v
                    && self
                        .rule
                        .promote(&self.oracles, &self.steps[i].state, e)?
                        .is_some()
                {
                    next.insert(e);
                }
            }
            self.survivors.push(next);
            self.construct_level(i + 1)?;
            break;
        }
        Ok(())
    }

    pub fn delete(&mut self, v: ElementId) -> Result<()> {
        if !self.alive.remove(&v) {
            return Err(Error::NotAlive(v));
        }
        self.epoch += 1;
        self.survivors[0].remove(v);
        for i in 1..=self.level_count() {
            if !self.survivors[i].remove(v) {
                break;
            }
            if self.steps[i].chosen == Some(v) {
                self.construct_level(i)?;
                break;
            }
        }
        Ok(())
    }

    /// `(I_T, f(I_T))`. A value not cached by the rule is evaluated on the
    /// reporting handle once per structural change.
    pub fn solution(&mut self) -> Result<(ElementSet, f64)> {
        let top = &self.steps[self.level_count()].state;
        let set = self.rule.solution_set(top).clone();
        if let Some(v) = self.rule.cached_solution_value(top) {
            return Ok((set, v));
        }
        match self.solution_cache {
            Some((epoch, v)) if epoch == self.epoch => Ok((set, v)),
            _ => {
                let v = self.report.evaluate(&set)?;
                self.solution_cache = Some((self.epoch, v));
                Ok((set, v))
            }
        }
    }

    /// Recomputes every level invariant from first principles on the audit
    /// handles.
    pub fn check_invariants(&self) -> Result<InvariantReport> {
        let mut checked = vec![Invariant::Starter, Invariant::Survivor];
        checked.extend_from_slice(R::STEP_INVARIANTS);
        checked.extend_from_slice(&[
            Invariant::Terminator,
            Invariant::Cache,
            Invariant::LevelCount,
        ]);
        let mut report = InvariantReport::new(&checked);
        let top = self.level_count();

        let r0 = self.survivors[0].to_set();
        let alive: ElementSet = self.alive.iter().copied().collect();
        if r0 != alive {
            report.fail(
                Invariant::Starter,
                0,
                format!("R_0 = {r0} but alive set is {alive}"),
            );
        }
        if !self.rule.is_empty_state(&self.steps[0].state) || self.steps[0].chosen.is_some() {
            report.fail(Invariant::Starter, 0, "level 0 is not empty");
        }
        if self.survivors.len() != top + 2 {
            report.fail(
                Invariant::Terminator,
                top + 1,
                format!(
                    "{} survivor pools stored for T = {top}",
                    self.survivors.len()
                ),
            );
        }

        let mut fresh_states = Vec::with_capacity(top + 1);
        for (i, step) in self.steps.iter().enumerate() {
            let fresh = self.rule.refresh(&self.audit, &step.state)?;
            if !self.rule.cache_matches(&step.state, &fresh) {
                report.fail(
                    Invariant::Cache,
                    i,
                    format!("cached values at level {i} are stale"),
                );
            }
            fresh_states.push(fresh);
        }

        for i in 1..=(top + 1).min(self.survivors.len() - 1) {
            let prev_chosen = self.steps[i - 1].chosen;
            let mut expected = ElementSet::new();
            for &e in self.survivors[i - 1].members() {
                if Some(e) == prev_chosen {
                    continue;
                }
                if self
                    .rule
                    .promote(&self.audit, &fresh_states[i - 1], e)?
                    .is_some()
                {
                    expected.insert(e);
                }
            }
            let stored = self.survivors[i].to_set();
            if stored != expected {
                let missing: ElementSet =
                    expected.iter().filter(|&e| !stored.contains(e)).collect();
                let extra: ElementSet = stored.iter().filter(|&e| !expected.contains(e)).collect();
                report.fail(
                    Invariant::Survivor,
                    i,
                    format!("R_{i} missing {missing}, unexpected {extra}"),
                );
            }
        }

        for i in 1..=top {
            let Some(e) = self.steps[i].chosen else {
                report.fail(
                    R::STEP_INVARIANTS[0],
                    i,
                    format!("level {i} has no chosen element"),
                );
                continue;
            };
            if !self.survivors[i].contains(e) {
                report.fail(
                    R::STEP_INVARIANTS[0],
                    i,
                    format!("e_{i} = {e} is not in R_{i}"),
                );
            }
            self.rule.check_step(
                &self.audit,
                i,
                &fresh_states[i - 1],
                e,
                &self.steps[i].state,
                &mut report,
            )?;
        }

        if let Some(frontier) = self.survivors.get(top + 1) {
            if !frontier.is_empty() {
                report.fail(
                    Invariant::Terminator,
                    top + 1,
                    format!("R_{} = {} is not empty", top + 1, frontier.to_set()),
                );
            }
        }

        if top > self.rule.level_bound() {
            report.fail(
                Invariant::LevelCount,
                top,
                format!("T = {top} exceeds bound {}", self.rule.level_bound()),
            );
        }
        Ok(report)
    }

    /// Runs `construct_level(level)` on a copy reseeded with `seed` and
    /// returns the element it samples as `e_level`.
    pub fn rebuild_choice(&self, level: usize, seed: u64) -> Result<Option<ElementId>> {
        let mut copy = self.detached();
        copy.reseed(seed);
        copy.construct_level(level)?;
        Ok(copy.chosen(level))
    }

    /// A copy with fresh counters, for what-if experiments.
    pub fn detached(&self) -> Self {
        let mut copy = self.clone();
        copy.oracles = self.oracles.fresh();
        copy.audit = self.audit.fresh();
        copy.report = self.report.handle();
        copy.placement = PlacementAudit::default();
        copy
    }

    /// Fault injection for tests of the checker.
    #[doc(hidden)]
    pub fn corrupt_remove_survivor(&mut self, level: usize, e: ElementId) -> bool {
        self.survivors.get_mut(level).is_some_and(|r| r.remove(e))
    }
}
