//! Families of instances over geometric guesses, so neither `OPT` nor
//! `MAX = max_e f({e})` has to be known in advance.
//!
//! Instance `i` runs with guess `(1+ε)^i` for `OPT` (cardinality) or `2^i`
//! for `MAX` (matroid). An element only enters the instances whose admission
//! interval contains `f({e})`; instances are created on first use and
//! dropped once empty.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cardinality::{self, CardinalityInstance, CardinalityRule};
use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::invariants::InvariantReport;
use crate::leveled::{LevelRule, LeveledStructure, PlacementAudit};
use crate::matroid::{self, MatroidInstance, MatroidRule};
use crate::oracle::{MatroidOracle, ProblemSpec, SubmodularOracle};
use crate::uniformity::{rebuild_trials, UniformityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GuessMode {
    /// Guesses `(1+ε)^i` of `OPT`; admits `f({e})` in `[(1+ε)^i/(2k), (1+ε)^i]`.
    Opt,
    /// Guesses `2^i` of `MAX`; admits `f({e})` in `[ε/(10k)·2^i, 2^i]`.
    Max,
}

/// The pure routing rule of a family.
#[derive(Debug, Clone)]
pub struct Router {
    pub mode: GuessMode,
    pub epsilon: f64,
    pub k: usize,
    pub tol: f64,
    /// Optional `[i_min, i_max]` cap on instance indices.
    pub clamp: Option<(i64, i64)>,
}

impl Router {
    pub fn new(mode: GuessMode, k: usize, epsilon: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Validation("k must be positive".into()));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Validation(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        Ok(Router {
            mode,
            epsilon,
            k,
            tol: 0.0,
            clamp: None,
        })
    }

    fn base(&self) -> f64 {
        match self.mode {
            GuessMode::Opt => 1.0 + self.epsilon,
            GuessMode::Max => 2.0,
        }
    }

    pub fn guess(&self, i: i64) -> f64 {
        self.base().powi(i as i32)
    }

    /// Smallest value an instance with guess `g` admits.
    fn floor_of(&self, g: f64) -> f64 {
        match self.mode {
            GuessMode::Opt => cardinality::threshold(self.k, g),
            GuessMode::Max => matroid::admission_threshold(self.epsilon, self.k, g),
        }
    }

    /// `true` when instance `i` admits an element of singleton value `v`.
    pub fn admits(&self, i: i64, v: f64) -> bool {
        let g = self.guess(i);
        self.floor_of(g) - self.tol <= v && v <= g + self.tol
    }

    /// Closed range of instance indices admitting `v`, before clamping.
    /// `None` for `v <= 0`.
    pub fn raw_range(&self, v: f64) -> Option<(i64, i64)> {
        if !(v.is_finite() && v > 0.0) {
            return None;
        }
        let ln_b = self.base().ln();
        let mut lo = (v.ln() / ln_b).ceil() as i64;
        while self.admits(lo - 1, v) {
            lo -= 1;
        }
        while !self.admits(lo, v) && self.guess(lo) < v {
            lo += 1;
        }
        let mut hi = lo;
        while self.admits(hi + 1, v) {
            hi += 1;
        }
        self.admits(lo, v).then_some((lo, hi))
    }

    /// Routing range after the optional clamp. An element entirely outside
    /// the clamp goes to the nearest allowed index, with a warning.
    pub fn route(&self, v: f64) -> Option<(i64, i64)> {
        let (lo, hi) = self.raw_range(v)?;
        let Some((cmin, cmax)) = self.clamp else {
            return Some((lo, hi));
        };
        let (clo, chi) = (lo.max(cmin), hi.min(cmax));
        if (clo, chi) != (lo, hi) {
            log::warn!("value {v} routes to [{lo}, {hi}], clamped to [{cmin}, {cmax}]");
        }
        if clo <= chi {
            Some((clo, chi))
        } else if lo > cmax {
            Some((cmax, cmax))
        } else {
            Some((cmin, cmin))
        }
    }

    /// Upper bound on the routing width: `⌈log_{1+ε}(2k)⌉ + 1` or
    /// `⌈log₂(10k/ε)⌉ + 1`.
    pub fn width_bound(&self) -> usize {
        let ratio = match self.mode {
            GuessMode::Opt => 2.0 * self.k as f64,
            GuessMode::Max => 10.0 * self.k as f64 / self.epsilon,
        };
        (ratio.ln() / self.base().ln()).ceil() as usize + 1
    }
}

pub type InstanceFactory<R> =
    Box<dyn Fn(f64, ChaCha8Rng) -> Result<LeveledStructure<R>> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Update {
    Insert(ElementId),
    Delete(ElementId),
}

impl Update {
    pub fn element(&self) -> ElementId {
        match self {
            Update::Insert(e) | Update::Delete(e) => *e,
        }
    }
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Update::Insert(e) => write!(f, "+ {e}"),
            Update::Delete(e) => write!(f, "- {e}"),
        }
    }
}

/// What one update did.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct UpdateOutcome {
    pub touched: Vec<i64>,
    /// Queries billed to maintenance, including the singleton lookup.
    pub queries: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FamilyStats {
    pub alive: usize,
    pub live_instances: usize,
    pub instances_created: u64,
    pub routing_queries: u64,
    /// Routing plus every instance's maintenance queries, including dropped
    /// instances.
    pub update_queries: u64,
    pub audit_queries: u64,
    pub report_queries: u64,
    pub placements_checked: u64,
    pub placement_mismatches: u64,
}

pub struct GuessFamily<R: LevelRule> {
    router: Router,
    seed: u64,
    factory: InstanceFactory<R>,
    instances: BTreeMap<i64, LeveledStructure<R>>,
    /// Times each index has been created, so a recreated instance draws a
    /// fresh random stream.
    generations: HashMap<i64, u64>,
    singleton: SubmodularOracle,
    values: HashMap<ElementId, f64>,
    shadow_scan: bool,
    created: u64,
    retired_update: u64,
    retired_audit: u64,
    retired_report: u64,
    retired_placement: PlacementAudit,
}

impl<R: LevelRule> fmt::Debug for GuessFamily<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GuessFamily")
            .field("router", &self.router)
            .field("seed", &self.seed)
            .field("instances", &self.instances.keys().collect::<Vec<_>>())
            .finish_non_exhaustive()
    }
}

impl<R: LevelRule> GuessFamily<R> {
    pub fn new(
        router: Router,
        f: &SubmodularOracle,
        seed: u64,
        factory: InstanceFactory<R>,
    ) -> Self {
        GuessFamily {
            router,
            seed,
            factory,
            instances: BTreeMap::new(),
            generations: HashMap::new(),
            singleton: f.handle(),
            values: HashMap::new(),
            shadow_scan: false,
            created: 0,
            retired_update: 0,
            retired_audit: 0,
            retired_report: 0,
            retired_placement: PlacementAudit::default(),
        }
    }

    pub fn with_shadow_scan(mut self, on: bool) -> Self {
        self.shadow_scan = on;
        self
    }

    pub fn router(&self) -> &Router {
        &self.router
    }

    pub fn instances(&self) -> &BTreeMap<i64, LeveledStructure<R>> {
        &self.instances
    }

    pub fn instance(&self, i: i64) -> Option<&LeveledStructure<R>> {
        self.instances.get(&i)
    }

    pub fn is_alive(&self, e: ElementId) -> bool {
        self.values.contains_key(&e)
    }

    pub fn alive_count(&self) -> usize {
        self.values.len()
    }

    /// `true` when some instance holds `e` in a pool `R_i`, `i >= 1`. A
    /// delete of an element for which this is `false` costs no queries.
    pub fn in_survivor_pools(&self, e: ElementId) -> bool {
        self.instances.values().any(|x| x.in_survivor_pools(e))
    }

    /// Memoized `f({e})` of an alive element.
    pub fn singleton_value(&self, e: ElementId) -> Option<f64> {
        self.values.get(&e).copied()
    }

    fn rng_for(&self, i: i64, generation: u64) -> ChaCha8Rng {
        let mut rng =
            ChaCha8Rng::seed_from_u64(self.seed ^ generation.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        rng.set_stream(i as u64);
        rng
    }

    fn instance_mut(&mut self, i: i64) -> Result<&mut LeveledStructure<R>> {
        if !self.instances.contains_key(&i) {
            let generation = self.generations.entry(i).or_insert(0);
            let g = *generation;
            *generation += 1;
            let inst = (self.factory)(self.router.guess(i), self.rng_for(i, g))?
                .with_shadow_scan(self.shadow_scan);
            self.created += 1;
            self.instances.insert(i, inst);
        }
        Ok(self.instances.get_mut(&i).expect("just inserted"))
    }

    fn maintenance_queries(&self) -> u64 {
        self.singleton.queries()
            + self.retired_update
            + self
                .instances
                .values()
                .map(|x| x.update_queries())
                .sum::<u64>()
    }

    pub fn update(&mut self, update: Update) -> Result<UpdateOutcome> {
        let before = self.maintenance_queries();
        let mut touched = Vec::new();
        match update {
            Update::Insert(e) => {
                if self.values.contains_key(&e) {
                    return Err(Error::AlreadyAlive(e));
                }
                let v = self.singleton.singleton(e)?;
                self.values.insert(e, v);
                if let Some((lo, hi)) = self.router.route(v) {
                    for i in lo..=hi {
                        self.instance_mut(i)?.insert(e)?;
                        touched.push(i);
                    }
                }
            }
            Update::Delete(e) => {
                let v = self.values.remove(&e).ok_or(Error::NotAlive(e))?;
                if let Some((lo, hi)) = self.router.route(v) {
                    for i in lo..=hi {
                        let Some(inst) = self.instances.get_mut(&i) else {
                            continue;
                        };
                        inst.delete(e)?;
                        touched.push(i);
                        if inst.is_empty() {
                            let gone = self.instances.remove(&i).expect("present");
                            self.retired_update += gone.update_queries();
                            self.retired_audit += gone.audit_queries();
                            self.retired_report += gone.report_queries();
                            let p = gone.placement_audit();
                            self.retired_placement.checked += p.checked;
                            self.retired_placement.mismatches += p.mismatches;
                        }
                    }
                }
            }
        }
        Ok(UpdateOutcome {
            touched,
            queries: self.maintenance_queries() - before,
        })
    }

    pub fn insert(&mut self, e: ElementId) -> Result<UpdateOutcome> {
        self.update(Update::Insert(e))
    }

    pub fn delete(&mut self, e: ElementId) -> Result<UpdateOutcome> {
        self.update(Update::Delete(e))
    }

    /// The best `I_T` over live instances, with the index that produced it.
    /// Ties keep the smallest index.
    pub fn best_solution(&mut self) -> Result<(ElementSet, f64, Option<i64>)> {
        let mut best = (ElementSet::new(), 0.0, None);
        for (&i, inst) in self.instances.iter_mut() {
            let (set, v) = inst.solution()?;
            if best.2.is_none() || v > best.1 {
                best = (set, v, Some(i));
            }
        }
        Ok(best)
    }

    /// `(index, T)` for every live instance.
    pub fn level_counts(&self) -> Vec<(i64, usize)> {
        self.instances
            .iter()
            .map(|(&i, x)| (i, x.level_count()))
            .collect()
    }

    /// `(index, level bound)` for every live instance.
    pub fn level_bounds(&self) -> Vec<(i64, usize)> {
        self.instances
            .iter()
            .map(|(&i, x)| (i, x.rule().level_bound()))
            .collect()
    }

    /// Audits the listed instances that are still live.
    pub fn check_instances(&self, indices: &[i64]) -> Result<Vec<(i64, InvariantReport)>> {
        indices
            .iter()
            .filter_map(|i| self.instances.get(i).map(|x| (*i, x)))
            .map(|(i, x)| Ok((i, x.check_invariants()?)))
            .collect()
    }

    pub fn check_all(&self) -> Result<Vec<(i64, InvariantReport)>> {
        let all: Vec<i64> = self.instances.keys().copied().collect();
        self.check_instances(&all)
    }

    /// Rebuild trials at the level of instance `index` with the largest
    /// survivor pool (lowest such level on ties).
    pub fn uniformity(&self, index: i64, trials: usize, seed: u64) -> Result<UniformityReport> {
        let inst = self
            .instances
            .get(&index)
            .ok_or_else(|| Error::Precondition(format!("no live instance {index}")))?;
        let level = (1..=inst.level_count())
            .max_by_key(|&i| {
                (
                    inst.survivors(i).map_or(0, |r| r.len()),
                    std::cmp::Reverse(i),
                )
            })
            .filter(|&i| inst.survivors(i).map_or(0, |r| r.len()) >= 2)
            .ok_or_else(|| {
                Error::Precondition(format!(
                    "instance {index} has no level with two or more survivors"
                ))
            })?;
        rebuild_trials(inst, level, trials, seed)
    }

    pub fn stats(&self) -> FamilyStats {
        let live = self.instances.values();
        let placement = live.clone().fold(self.retired_placement, |mut acc, x| {
            let p = x.placement_audit();
            acc.checked += p.checked;
            acc.mismatches += p.mismatches;
            acc
        });
        FamilyStats {
            alive: self.values.len(),
            live_instances: self.instances.len(),
            instances_created: self.created,
            routing_queries: self.singleton.queries(),
            update_queries: self.maintenance_queries(),
            audit_queries: self.retired_audit
                + live.clone().map(|x| x.audit_queries()).sum::<u64>(),
            report_queries: self.retired_report + live.map(|x| x.report_queries()).sum::<u64>(),
            placements_checked: placement.checked,
            placement_mismatches: placement.mismatches,
        }
    }
}

pub type CardinalityFamily = GuessFamily<CardinalityRule>;
pub type MatroidFamily = GuessFamily<MatroidRule>;

impl CardinalityFamily {
    pub fn cardinality(
        f: &SubmodularOracle,
        k: usize,
        epsilon: f64,
        seed: u64,
        tol: f64,
    ) -> Result<Self> {
        let mut router = Router::new(GuessMode::Opt, k, epsilon)?;
        router.tol = tol;
        let f2 = f.handle();
        let factory: InstanceFactory<CardinalityRule> = Box::new(move |g, rng| {
            let rule = CardinalityRule::new(k, g)?.with_tolerance(tol);
            Ok(CardinalityInstance::new(rule, f2.handle(), rng))
        });
        Ok(GuessFamily::new(router, f, seed, factory))
    }
}

impl MatroidFamily {
    pub fn matroid(
        f: &SubmodularOracle,
        m: &MatroidOracle,
        epsilon: f64,
        seed: u64,
        tol: f64,
    ) -> Result<Self> {
        let mut router = Router::new(GuessMode::Max, m.rank(), epsilon)?;
        router.tol = tol;
        let (f2, m2) = (f.handle(), m.handle());
        let factory: InstanceFactory<MatroidRule> = Box::new(move |g, rng| {
            let rule = MatroidRule::new(g, epsilon, m2.rank())?.with_tolerance(tol);
            Ok(MatroidInstance::new(
                rule,
                matroid::MatroidHandles::new(&f2, &m2),
                rng,
            ))
        });
        Ok(GuessFamily::new(router, f, seed, factory))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    Cardinality,
    Matroid,
}

impl std::str::FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cardinality" => Ok(Constraint::Cardinality),
            "matroid" => Ok(Constraint::Matroid),
            other => Err(Error::Validation(format!("unknown constraint {other:?}"))),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::Cardinality => "cardinality",
            Constraint::Matroid => "matroid",
        })
    }
}

/// The constraint-independent view of a family used by [`Solver`].
trait Family: Send {
    fn update(&mut self, update: Update) -> Result<UpdateOutcome>;
    fn best_solution(&mut self) -> Result<(ElementSet, f64, Option<i64>)>;
    fn level_counts(&self) -> Vec<(i64, usize)>;
    fn level_bounds(&self) -> Vec<(i64, usize)>;
    fn check_instances(&self, indices: &[i64]) -> Result<Vec<(i64, InvariantReport)>>;
    fn stats(&self) -> FamilyStats;
    fn router(&self) -> &Router;
    fn is_alive(&self, e: ElementId) -> bool;
    fn in_survivor_pools(&self, e: ElementId) -> bool;
    fn uniformity(&self, index: i64, trials: usize, seed: u64) -> Result<UniformityReport>;
}

impl<R: LevelRule + 'static> Family for GuessFamily<R> {
    fn update(&mut self, update: Update) -> Result<UpdateOutcome> {
        GuessFamily::update(self, update)
    }
    fn best_solution(&mut self) -> Result<(ElementSet, f64, Option<i64>)> {
        GuessFamily::best_solution(self)
    }
    fn level_counts(&self) -> Vec<(i64, usize)> {
        GuessFamily::level_counts(self)
    }
    fn level_bounds(&self) -> Vec<(i64, usize)> {
        GuessFamily::level_bounds(self)
    }
    fn check_instances(&self, indices: &[i64]) -> Result<Vec<(i64, InvariantReport)>> {
        GuessFamily::check_instances(self, indices)
    }
    fn stats(&self) -> FamilyStats {
        GuessFamily::stats(self)
    }
    fn router(&self) -> &Router {
        GuessFamily::router(self)
    }
    fn is_alive(&self, e: ElementId) -> bool {
        GuessFamily::is_alive(self, e)
    }
    fn in_survivor_pools(&self, e: ElementId) -> bool {
        GuessFamily::in_survivor_pools(self, e)
    }
    fn uniformity(&self, index: i64, trials: usize, seed: u64) -> Result<UniformityReport> {
        GuessFamily::uniformity(self, index, trials, seed)
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub constraint: Constraint,
    /// Cardinality bound. Under a matroid constraint the rank is used and a
    /// given `k` must match it.
    pub k: Option<usize>,
    pub epsilon: f64,
    pub seed: u64,
    pub float_tol: f64,
    pub clamp: Option<(i64, i64)>,
    pub shadow_scan: bool,
}

impl SolverConfig {
    pub fn new(constraint: Constraint, k: Option<usize>, epsilon: f64, seed: u64) -> Self {
        SolverConfig {
            constraint,
            k,
            epsilon,
            seed,
            float_tol: 0.0,
            clamp: None,
            shadow_scan: false,
        }
    }
}

/// A dynamic solver over a problem spec: the entry point for most callers.
pub struct Solver {
    constraint: Constraint,
    k: usize,
    family: Box<dyn Family>,
    f: SubmodularOracle,
    m: Option<MatroidOracle>,
}

impl fmt::Debug for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solver")
            .field("constraint", &self.constraint)
            .field("k", &self.k)
            .field("router", self.family.router())
            .finish_non_exhaustive()
    }
}

impl Solver {
    pub fn new(config: &SolverConfig, problem: &ProblemSpec) -> Result<Self> {
        let f = problem.function.build_function()?;
        let m = problem
            .matroid
            .as_ref()
            .map(|m| m.build_matroid())
            .transpose()?;
        Self::with_oracles(config, f, m)
    }

    pub fn with_oracles(
        config: &SolverConfig,
        f: SubmodularOracle,
        m: Option<MatroidOracle>,
    ) -> Result<Self> {
        let tol = config.float_tol;
        let (k, family): (usize, Box<dyn Family>) = match config.constraint {
            Constraint::Cardinality => {
                let k = config
                    .k
                    .ok_or_else(|| Error::Validation("a cardinality constraint needs k".into()))?;
                let mut fam =
                    CardinalityFamily::cardinality(&f, k, config.epsilon, config.seed, tol)?
                        .with_shadow_scan(config.shadow_scan);
                fam.router.clamp = config.clamp;
                (k, Box::new(fam))
            }
            Constraint::Matroid => {
                let Some(m) = &m else {
                    return Err(Error::Validation(
                        "a matroid constraint needs a matroid spec".into(),
                    ));
                };
                if let Some(k) = config.k.filter(|&k| k != m.rank()) {
                    return Err(Error::Validation(format!(
                        "k = {k} but the matroid has rank {}",
                        m.rank()
                    )));
                }
                let mut fam = MatroidFamily::matroid(&f, m, config.epsilon, config.seed, tol)?
                    .with_shadow_scan(config.shadow_scan);
                fam.router.clamp = config.clamp;
                (m.rank(), Box::new(fam))
            }
        };
        Ok(Solver {
            constraint: config.constraint,
            k,
            family,
            f,
            m,
        })
    }

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn function(&self) -> &SubmodularOracle {
        &self.f
    }

    pub fn matroid(&self) -> Option<&MatroidOracle> {
        self.m.as_ref()
    }

    pub fn router(&self) -> &Router {
        self.family.router()
    }

    pub fn is_alive(&self, e: ElementId) -> bool {
        self.family.is_alive(e)
    }

    pub fn in_survivor_pools(&self, e: ElementId) -> bool {
        self.family.in_survivor_pools(e)
    }

    pub fn update(&mut self, update: Update) -> Result<UpdateOutcome> {
        self.family.update(update)
    }

    pub fn insert(&mut self, e: ElementId) -> Result<UpdateOutcome> {
        self.update(Update::Insert(e))
    }

    pub fn delete(&mut self, e: ElementId) -> Result<UpdateOutcome> {
        self.update(Update::Delete(e))
    }

    /// Best reported set, its value and the guess index that produced it.
    pub fn solution(&mut self) -> Result<(ElementSet, f64, Option<i64>)> {
        self.family.best_solution()
    }

    pub fn level_counts(&self) -> Vec<(i64, usize)> {
        self.family.level_counts()
    }

    pub fn level_bounds(&self) -> Vec<(i64, usize)> {
        self.family.level_bounds()
    }

    pub fn check_instances(&self, indices: &[i64]) -> Result<Vec<(i64, InvariantReport)>> {
        self.family.check_instances(indices)
    }

    pub fn check_all(&self) -> Result<Vec<(i64, InvariantReport)>> {
        let all: Vec<i64> = self.level_counts().into_iter().map(|(i, _)| i).collect();
        self.family.check_instances(&all)
    }

    pub fn stats(&self) -> FamilyStats {
        self.family.stats()
    }

    /// Uniformity trials on instance `index`, or on the instance currently
    /// reporting the best solution.
    pub fn uniformity(
        &mut self,
        index: Option<i64>,
        trials: usize,
        seed: u64,
    ) -> Result<UniformityReport> {
        let index = match index {
            Some(i) => i,
            None => self
                .solution()?
                .2
                .ok_or_else(|| Error::Precondition("no live instance to test".into()))?,
        };
        self.family.uniformity(index, trials, seed)
    }
}
