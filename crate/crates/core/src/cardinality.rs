//! Leveled structure for one fixed guess of `OPT` under a cardinality
//! constraint `|S| <= k`. An element promotes level `L_l` when `|I_l| < k`
//! and its marginal gain over `I_l` is at least `τ = OPT/(2k)`.

use rand_chacha::ChaCha8Rng;

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::invariants::{Invariant, InvariantReport};
use crate::leveled::{LevelRule, LeveledStructure};
use crate::oracle::SubmodularOracle;

/// `I_i` with its cached value `f(I_i)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CardinalityState {
    pub set: ElementSet,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct CardinalityRule {
    k: usize,
    opt_guess: f64,
    tau: f64,
    tol: f64,
}

impl CardinalityRule {
    pub fn new(k: usize, opt_guess: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Validation("k must be positive".into()));
        }
        if !(opt_guess.is_finite() && opt_guess > 0.0) {
            return Err(Error::Validation(format!(
                "OPT guess must be positive, got {opt_guess}"
            )));
        }
        Ok(CardinalityRule {
            k,
            opt_guess,
            tau: threshold(k, opt_guess),
            tol: 0.0,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn opt_guess(&self) -> f64 {
        self.opt_guess
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `f(I + e)` when `e` promotes `I`, whose value `f(I)` is supplied. A
    /// full `I` is rejected before any query is made.
    pub fn promote_card(
        &self,
        f: &SubmodularOracle,
        set: &ElementSet,
        value: f64,
        e: ElementId,
    ) -> Result<Option<f64>> {
        if set.contains(e) {
            return Err(Error::Precondition(format!("{e} already belongs to I")));
        }
        if set.len() >= self.k {
            return Ok(None);
        }
        let with = f.evaluate(&set.with(e))?;
        Ok((with - value >= self.tau - self.tol).then_some(with))
    }
}

/// `OPT/(2k)`, shared with the guess router.
pub(crate) fn threshold(k: usize, opt_guess: f64) -> f64 {
    opt_guess / (2.0 * k as f64)
}

impl LevelRule for CardinalityRule {
    type Oracles = SubmodularOracle;
    type State = CardinalityState;
    /// `f(I + e)`
    type Accept = f64;

    const STEP_INVARIANTS: &'static [Invariant] = &[Invariant::Cardinality];

    fn empty_state(&self) -> CardinalityState {
        CardinalityState::default()
    }

    fn is_empty_state(&self, state: &CardinalityState) -> bool {
        state.set.is_empty() && state.value == 0.0
    }

    fn promote(
        &self,
        f: &SubmodularOracle,
        state: &CardinalityState,
        e: ElementId,
    ) -> Result<Option<f64>> {
        self.promote_card(f, &state.set, state.value, e)
    }

    fn advance(&self, state: &CardinalityState, e: ElementId, with: &f64) -> CardinalityState {
        CardinalityState {
            set: state.set.with(e),
            value: *with,
        }
    }

    fn solution_set<'a>(&self, state: &'a CardinalityState) -> &'a ElementSet {
        &state.set
    }

    fn cached_solution_value(&self, state: &CardinalityState) -> Option<f64> {
        Some(state.value)
    }

    fn refresh(&self, f: &SubmodularOracle, state: &CardinalityState) -> Result<CardinalityState> {
        Ok(CardinalityState {
            set: state.set.clone(),
            value: f.evaluate(&state.set)?,
        })
    }

    fn cache_matches(&self, stored: &CardinalityState, fresh: &CardinalityState) -> bool {
        (stored.value - fresh.value).abs() <= self.tol
    }

    fn check_step(
        &self,
        audit: &SubmodularOracle,
        level: usize,
        prev: &CardinalityState,
        chosen: ElementId,
        next: &CardinalityState,
        report: &mut InvariantReport,
    ) -> Result<()> {
        if prev.set.contains(chosen) {
            report.fail(
                Invariant::Cardinality,
                level,
                format!("e_{level} = {chosen} already in I_{}", level - 1),
            );
            return Ok(());
        }
        if next.set != prev.set.with(chosen) {
            report.fail(
                Invariant::Cardinality,
                level,
                format!(
                    "I_{level} = {} but I_{} + e_{level} = {}",
                    next.set,
                    level - 1,
                    prev.set.with(chosen)
                ),
            );
        }
        if next.set.len() != level {
            report.fail(
                Invariant::Cardinality,
                level,
                format!("|I_{level}| = {}", next.set.len()),
            );
        }
        if self
            .promote_card(audit, &prev.set, prev.value, chosen)?
            .is_none()
        {
            report.fail(
                Invariant::Cardinality,
                level,
                format!("e_{level} = {chosen} does not promote I_{}", level - 1),
            );
        }
        Ok(())
    }

    fn level_bound(&self) -> usize {
        self.k
    }
}

pub type CardinalityInstance = LeveledStructure<CardinalityRule>;

impl CardinalityInstance {
    pub fn for_guess(
        f: &SubmodularOracle,
        k: usize,
        opt_guess: f64,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        Ok(LeveledStructure::new(
            CardinalityRule::new(k, opt_guess)?,
            f.handle(),
            rng,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::set_of;
    use crate::oracle::Modular;
    use rand::SeedableRng;
    use std::sync::Arc;

    fn modular(values: &[(u64, f64)]) -> SubmodularOracle {
        SubmodularOracle::new(Arc::new(
            Modular::new(values.iter().map(|&(e, v)| (ElementId(e), v)).collect()).unwrap(),
        ))
    }

    #[test]
    fn threshold_boundary_is_inclusive() {
        // τ = 4/(2·2) = 1
        let f = modular(&[(1, 1.0), (2, 0.5)]);
        let rule = CardinalityRule::new(2, 4.0).unwrap();
        assert_eq!(rule.tau(), 1.0);
        assert_eq!(
            rule.promote_card(&f, &ElementSet::new(), 0.0, ElementId(1))
                .unwrap(),
            Some(1.0)
        );
        assert_eq!(
            rule.promote_card(&f, &ElementSet::new(), 0.0, ElementId(2))
                .unwrap(),
            None
        );
    }

    #[test]
    fn full_set_rejects_without_query() {
        let f = modular(&[(1, 9.0), (2, 9.0)]);
        let rule = CardinalityRule::new(1, 2.0).unwrap();
        assert_eq!(
            rule.promote_card(&f, &set_of(&[1]), 9.0, ElementId(2))
                .unwrap(),
            None
        );
        assert_eq!(f.queries(), 0);
    }

    #[test]
    fn modular_fills_to_k() {
        let f = modular(&[(1, 3.0), (2, 4.0), (3, 5.0), (4, 0.1)]);
        let mut inst =
            CardinalityInstance::for_guess(&f, 2, 4.0, ChaCha8Rng::seed_from_u64(3)).unwrap();
        inst.init(f.ground_set()).unwrap();
        let (set, value) = inst.solution().unwrap();
        assert_eq!(set.len(), 2);
        assert!(!set.contains(ElementId(4)));
        assert!(value >= 2.0 * inst.rule().tau());
        assert!(inst.check_invariants().unwrap().passed());
    }

    #[test]
    fn all_below_threshold_gives_empty() {
        let f = modular(&[(1, 0.1), (2, 0.2)]);
        let mut inst =
            CardinalityInstance::for_guess(&f, 2, 4.0, ChaCha8Rng::seed_from_u64(0)).unwrap();
        inst.init(f.ground_set()).unwrap();
        assert_eq!(inst.level_count(), 0);
        assert_eq!(inst.solution().unwrap(), (ElementSet::new(), 0.0));
    }
}
