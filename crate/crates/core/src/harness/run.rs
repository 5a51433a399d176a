use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::guessing::{Constraint, Solver, SolverConfig, Update};
use crate::oracle::ProblemSpec;
use crate::reference::{brute_force_opt, greedy_baseline, BaselineResult, Feasibility};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    Greedy,
    Exact,
}

impl std::str::FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(BaselineKind::Greedy),
            "exact" => Ok(BaselineKind::Exact),
            other => Err(Error::Validation(format!(
                "unknown baseline {other:?}; use greedy or exact"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub solver: SolverConfig,
    /// Audit every touched instance after every event.
    pub check_invariants: bool,
    pub baseline: Option<BaselineKind>,
    /// Baseline every this many steps, and always after the last one.
    pub baseline_every: usize,
}

impl RunConfig {
    pub fn new(solver: SolverConfig) -> Self {
        RunConfig {
            solver,
            check_invariants: false,
            baseline: None,
            baseline_every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: usize,
    pub op: String,
    pub element: ElementId,
    pub alive: usize,
    pub value: f64,
    pub solution: ElementSet,
    pub best_index: Option<i64>,
    /// `(guess index, T)` per live instance.
    pub levels: Vec<(i64, usize)>,
    pub touched: Vec<i64>,
    pub update_queries: u64,
    pub audit_queries: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants_ok: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub constraint: Constraint,
    pub k: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub steps: usize,
    pub total_update_queries: u64,
    pub mean_queries_per_update: f64,
    pub max_queries_per_update: u64,
    pub routing_queries: u64,
    pub total_audit_queries: u64,
    pub report_queries: u64,
    pub invariant_checks: u64,
    pub invariant_violations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<String>,
    pub max_level_count: usize,
    pub level_bound_violations: u64,
    pub width_bound: usize,
    pub max_touched: usize,
    pub width_violations: u64,
    pub placements_checked: u64,
    pub placement_mismatches: u64,
    pub instances_created: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineKind>,
    pub baseline_evaluations: u64,
    pub baseline_queries: u64,
    /// Smallest `value / baseline` seen.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_ratio: Option<f64>,
    /// `2 + ε` or `4 + ε`.
    pub approximation_factor: f64,
    /// Exact-baseline steps with `factor · value < OPT`.
    pub bound_violations: u64,
    pub final_value: f64,
}

impl RunSummary {
    /// No invariant, level-count, routing-width, placement or approximation
    /// failure was recorded.
    pub fn clean(&self) -> bool {
        self.invariant_violations == 0
            && self.level_bound_violations == 0
            && self.width_violations == 0
            && self.placement_mismatches == 0
            && self.bound_violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub steps: Vec<StepRecord>,
    pub summary: RunSummary,
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    summary: &'a RunSummary,
}

impl RunReport {
    /// One JSON object per step followed by `{"summary": ...}`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("records serialize"));
            out.push('\n');
        }
        out.push_str(
            &serde_json::to_string(&SummaryLine {
                summary: &self.summary,
            })
            .expect("summary serializes"),
        );
        out.push('\n');
        out
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        file.write_all(self.to_jsonl().as_bytes())?;
        file.flush()?;
        Ok(())
    }
}

pub fn run(config: &RunConfig, problem: &ProblemSpec, events: &[Update]) -> Result<RunReport> {
    let solver = Solver::new(&config.solver, problem)?;
    run_with(config, solver, events)
}

/// Drives `solver` through `events`. Errors carry the index of the event
/// that raised them.
pub fn run_with(config: &RunConfig, mut solver: Solver, events: &[Update]) -> Result<RunReport> {
    let factor = match config.solver.constraint {
        Constraint::Cardinality => 2.0 + config.solver.epsilon,
        Constraint::Matroid => 4.0 + config.solver.epsilon,
    };
    let width_bound = solver.router().width_bound();
    let every = config.baseline_every.max(1);
    let mut alive = BTreeSet::new();
    let mut steps = Vec::with_capacity(events.len());
    let mut s = RunSummary {
        constraint: config.solver.constraint,
        k: solver.k(),
        epsilon: config.solver.epsilon,
        seed: config.solver.seed,
        steps: events.len(),
        total_update_queries: 0,
        mean_queries_per_update: 0.0,
        max_queries_per_update: 0,
        routing_queries: 0,
        total_audit_queries: 0,
        report_queries: 0,
        invariant_checks: 0,
        invariant_violations: 0,
        first_violation: None,
        max_level_count: 0,
        level_bound_violations: 0,
        width_bound,
        max_touched: 0,
        width_violations: 0,
        placements_checked: 0,
        placement_mismatches: 0,
        instances_created: 0,
        baseline: config.baseline,
        baseline_evaluations: 0,
        baseline_queries: 0,
        worst_ratio: None,
        approximation_factor: factor,
        bound_violations: 0,
        final_value: 0.0,
    };

    for (t, &ev) in events.iter().enumerate() {
        let at = |e: Error| Error::AtEvent {
            index: t,
            source: Box::new(e),
        };
        let audit_before = solver.stats().audit_queries;
        let outcome = solver.update(ev).map_err(at)?;
        match ev {
            Update::Insert(e) => alive.insert(e),
            Update::Delete(e) => alive.remove(&e),
        };

        let mut invariants_ok = None;
        let mut violations = Vec::new();
        if config.check_invariants {
            for (idx, report) in solver.check_instances(&outcome.touched).map_err(at)? {
                s.invariant_checks += 1;
                for v in &report.violations {
                    violations.push(format!("instance {idx}: {v}"));
                }
            }
            s.invariant_violations += violations.len() as u64;
            if s.first_violation.is_none() {
                s.first_violation = violations.first().map(|v| format!("event {t}: {v}"));
            }
            invariants_ok = Some(violations.is_empty());
        }

        let levels = solver.level_counts();
        for ((_, count), (_, bound)) in levels.iter().zip(solver.level_bounds()) {
            s.max_level_count = s.max_level_count.max(*count);
            if *count > bound {
                s.level_bound_violations += 1;
            }
        }
        s.max_touched = s.max_touched.max(outcome.touched.len());
        if outcome.touched.len() > width_bound {
            s.width_violations += 1;
        }

        let (solution, value, best_index) = solver.solution().map_err(at)?;
        let (mut baseline, mut ratio) = (None, None);
        if let Some(kind) = config.baseline {
            if (t + 1) % every == 0 || t + 1 == events.len() {
                let b = compute_baseline(kind, &solver, &alive).map_err(at)?;
                s.baseline_evaluations += 1;
                s.baseline_queries += b.queries_used;
                let r = if b.value > 0.0 { value / b.value } else { 1.0 };
                s.worst_ratio = Some(s.worst_ratio.map_or(r, |w: f64| w.min(r)));
                if kind == BaselineKind::Exact && factor * value < b.value {
                    s.bound_violations += 1;
                }
                baseline = Some(b.value);
                ratio = Some(r);
            }
        }

        s.max_queries_per_update = s.max_queries_per_update.max(outcome.queries);
        s.final_value = value;
        steps.push(StepRecord {
            t,
            op: if matches!(ev, Update::Insert(_)) {
                "+"
            } else {
                "-"
            }
            .to_string(),
            element: ev.element(),
            alive: alive.len(),
            value,
            solution,
            best_index,
            levels,
            touched: outcome.touched,
            update_queries: outcome.queries,
            audit_queries: solver.stats().audit_queries - audit_before,
            invariants_ok,
            violations,
            baseline,
            ratio,
        });
    }

    let stats = solver.stats();
    s.total_update_queries = stats.update_queries;
    s.mean_queries_per_update = if events.is_empty() {
        0.0
    } else {
        stats.update_queries as f64 / events.len() as f64
    };
    s.routing_queries = stats.routing_queries;
    s.total_audit_queries = stats.audit_queries;
    s.report_queries = stats.report_queries;
    s.placements_checked = stats.placements_checked;
    s.placement_mismatches = stats.placement_mismatches;
    s.instances_created = stats.instances_created;
    Ok(RunReport { steps, summary: s })
}

fn compute_baseline(
    kind: BaselineKind,
    solver: &Solver,
    alive: &BTreeSet<ElementId>,
) -> Result<BaselineResult> {
    let ground: ElementSet = alive.iter().copied().collect();
    let feas = match solver.matroid() {
        Some(m) if solver.constraint() == Constraint::Matroid => Feasibility::Matroid(m),
        _ => Feasibility::Cardinality(solver.k()),
    };
    match kind {
        BaselineKind::Greedy => greedy_baseline(&ground, solver.function(), feas),
        BaselineKind::Exact => brute_force_opt(&ground, solver.function(), feas),
    }
}
