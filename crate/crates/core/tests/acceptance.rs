//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dynsub::harness::{
    generate_problem, generate_stream, random_coverage, random_graphic, random_partition, run,
    BaselineKind, CoverageParams, Distribution, RunConfig, RunSummary,
};
use dynsub::oracle::Modular;
use dynsub::uniformity::rebuild_trials;
use dynsub::{
    find_min_circuit_swap, make_matroid, CardinalityInstance, Constraint, ElementId, ElementSet,
    MatroidInstance, MatroidKind, MatroidOracle, OracleSpec, ProblemSpec, Solver, SolverConfig,
    SubmodularOracle, Update,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Totals over the small exact-baseline runs, shared by several criteria.
#[derive(Default)]
struct Totals {
    streams: usize,
    steps: usize,
    bound_violations: u64,
    worst_ratio: f64,
    invariant_violations: u64,
    first_violation: Option<String>,
    level_bound_violations: u64,
    max_level_count: usize,
    width_violations: u64,
    max_touched: usize,
    placements_checked: u64,
    placement_mismatches: u64,
}

impl Totals {
    fn new() -> Self {
        Totals {
            worst_ratio: f64::INFINITY,
            ..Default::default()
        }
    }

    fn add(&mut self, s: &RunSummary) {
        self.streams += 1;
        self.steps += s.steps;
        self.bound_violations += s.bound_violations;
        if let Some(r) = s.worst_ratio {
            self.worst_ratio = self.worst_ratio.min(r);
        }
        self.invariant_violations += s.invariant_violations;
        if self.first_violation.is_none() {
            self.first_violation = s.first_violation.clone();
        }
        self.level_bound_violations += s.level_bound_violations;
        self.max_level_count = self.max_level_count.max(s.max_level_count);
        self.width_violations += s.width_violations;
        self.max_touched = self.max_touched.max(s.max_touched);
        self.placements_checked += s.placements_checked;
        self.placement_mismatches += s.placement_mismatches;
    }
}

fn small_coverage(n: usize, rng: &mut ChaCha8Rng) -> OracleSpec {
    let params = CoverageParams {
        universe: rng.gen_range(6..=16),
        items_per_element: rng.gen_range(1..=4),
        max_item_weight: 5,
    };
    OracleSpec::coverage(&random_coverage(n, params, rng.gen()).unwrap())
}

fn exact_run(
    constraint: Constraint,
    k: Option<usize>,
    epsilon: f64,
    seed: u64,
    problem: &ProblemSpec,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> RunSummary {
    let p = [0.2, 0.35, 0.5][rng.gen_range(0..3)];
    let events = generate_stream(n, 3 * n, Distribution::RandomMix(p), rng.gen()).unwrap();
    let mut cfg = RunConfig::new(SolverConfig::new(constraint, k, epsilon, seed));
    cfg.solver.shadow_scan = true;
    cfg.check_invariants = true;
    cfg.baseline = Some(BaselineKind::Exact);
    run(&cfg, problem, &events).unwrap().summary
}

fn cardinality_runs() -> Totals {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let mut totals = Totals::new();
    for s in 0..200u64 {
        let n = rng.gen_range(4..=14);
        let k = rng.gen_range(2..=4);
        let epsilon = if s % 2 == 0 { 0.5 } else { 1.0 };
        let problem = ProblemSpec {
            function: small_coverage(n, &mut rng),
            matroid: None,
        };
        totals.add(&exact_run(
            Constraint::Cardinality,
            Some(k),
            epsilon,
            s,
            &problem,
            n,
            &mut rng,
        ));
    }
    totals
}

fn matroid_runs() -> Totals {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let mut totals = Totals::new();
    for s in 0..200u64 {
        let n = rng.gen_range(4..=12);
        let epsilon = if s % 2 == 0 { 0.5 } else { 1.0 };
        let kind = if s % 4 < 2 {
            let blocks = rng.gen_range(2..=4);
            let capacity = if blocks == 2 { rng.gen_range(1..=2) } else { 1 };
            random_partition(n, blocks, capacity, rng.gen()).unwrap()
        } else {
            random_graphic(n, rng.gen_range(3..=5), rng.gen()).unwrap()
        };
        let rank = make_matroid(&kind).unwrap().rank();
        assert!(rank <= 4);
        let problem = ProblemSpec {
            function: small_coverage(n, &mut rng),
            matroid: Some(OracleSpec::matroid(&kind)),
        };
        totals.add(&exact_run(
            Constraint::Matroid,
            None,
            epsilon,
            s,
            &problem,
            n,
            &mut rng,
        ));
    }
    totals
}

fn approximation(label: &str, factor: &str, t: &Totals) -> Outcome {
    outcome(
        t.bound_violations == 0 && t.streams == 200,
        format!(
            "{label}: {} streams, {} steps, {} steps below OPT/{factor}, worst value/OPT {:.3}",
            t.streams, t.steps, t.bound_violations, t.worst_ratio
        ),
    )
}

fn invariant_runs(constraint: Constraint) -> Totals {
    let mut totals = Totals::new();
    for s in 0..10u64 {
        let n = 40;
        let problem = generate_problem(constraint, n, 4, 100 + s).unwrap();
        let events = generate_stream(n, 1000, Distribution::RandomMix(0.4), 200 + s).unwrap();
        let k = (constraint == Constraint::Cardinality).then_some(4);
        let epsilon = if s % 2 == 0 { 0.5 } else { 1.0 };
        let mut cfg = RunConfig::new(SolverConfig::new(constraint, k, epsilon, s));
        cfg.check_invariants = true;
        totals.add(&run(&cfg, &problem, &events).unwrap().summary);
    }
    totals
}

fn modular(n: u64) -> SubmodularOracle {
    SubmodularOracle::new(Arc::new(
        Modular::new((1..=n).map(|e| (ElementId(e), 1.0)).collect()).unwrap(),
    ))
}

/// Nine unit-value elements: every one promotes, so `R_2` holds the eight
/// not chosen as `e_1`.
fn uniformity() -> Outcome {
    let f = modular(9);
    let mut card =
        CardinalityInstance::for_guess(&f, 9, 2.0, ChaCha8Rng::seed_from_u64(1)).unwrap();
    card.init(f.ground_set()).unwrap();
    let m = make_matroid(&MatroidKind::Uniform(9)).unwrap();
    let mut mat =
        MatroidInstance::for_guess(&f, &m, 1.0, 1.0, ChaCha8Rng::seed_from_u64(1)).unwrap();
    mat.init(f.ground_set()).unwrap();

    let c = rebuild_trials(&card, 2, 2000, 10_000).unwrap();
    let mm = rebuild_trials(&mat, 2, 2000, 20_000).unwrap();
    let pass = c.pool.len() == 8 && mm.pool.len() == 8 && c.passes(1e-3) && mm.passes(1e-3);
    outcome(
        pass,
        format!(
            "uniform choice of e_2 over |R_2| = {}/{}: 2000 trials each, p = {:.4} (cardinality), {:.4} (matroid), alpha 0.001",
            c.pool.len(),
            mm.pool.len(),
            c.p_value,
            mm.p_value
        ),
    )
}

fn level_counts(card: &Totals, mat: &Totals) -> Outcome {
    outcome(
        card.level_bound_violations == 0 && mat.level_bound_violations == 0 && card.steps > 0,
        format!(
            "level counts: max T = {} (cardinality, k <= 4), {} (matroid); {} steps over the bound",
            card.max_level_count,
            mat.max_level_count,
            card.level_bound_violations + mat.level_bound_violations
        ),
    )
}

fn brute_force_swap(
    m: &MatroidOracle,
    i: &ElementSet,
    e: ElementId,
    w: &dyn Fn(ElementId) -> f64,
) -> Option<ElementId> {
    let with = i.with(e);
    i.iter()
        .filter(|&x| m.is_independent(&with.without(x)))
        .min_by(|&a, &b| w(a).total_cmp(&w(b)).then(a.cmp(&b)))
}

fn circuit_swaps() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC6);
    let (mut cases, mut mismatches, mut over_budget, mut loops) = (0, 0, 0, 0);
    let mut first = None;
    while cases < 10_000 {
        let ground = 14;
        let kind = match cases % 3 {
            0 => MatroidKind::Uniform(rng.gen_range(1..=8)),
            1 => random_partition(
                ground,
                rng.gen_range(2..=5),
                rng.gen_range(1..=3),
                rng.gen(),
            )
            .unwrap(),
            _ => random_graphic(ground, rng.gen_range(3..=9), rng.gen()).unwrap(),
        };
        let m = make_matroid(&kind).unwrap();
        let mut order: Vec<ElementId> = (1..=ground as u64).map(ElementId).collect();
        order.shuffle(&mut rng);
        let target = rng.gen_range(1..=8usize.min(m.rank()));
        let mut i = ElementSet::new();
        for &x in &order {
            if i.len() < target && m.is_independent(&i.with(x)) {
                i.insert(x);
            }
        }
        let candidates: Vec<ElementId> = order
            .iter()
            .copied()
            .filter(|&x| !i.contains(x) && !m.is_independent(&i.with(x)))
            .collect();
        let Some(&e) = candidates.choose(&mut rng) else {
            continue;
        };
        let weights: Vec<f64> = (0..=ground).map(|_| rng.gen_range(1..=6) as f64).collect();
        let w = |x: ElementId| weights[x.0 as usize];

        let counted = m.handle();
        let got = find_min_circuit_swap(&counted, &i, e, w).unwrap();
        let want = brute_force_swap(&m, &i, e, &w);
        let budget = (i.len() as f64 + 1.0).log2().ceil() as u64 + 2;
        if got.is_none() {
            loops += 1;
        }
        if got != want {
            mismatches += 1;
            first.get_or_insert(format!(
                "I = {i}, e = {e}: got {got:?}, brute force {want:?}"
            ));
        }
        if counted.queries() > budget {
            over_budget += 1;
        }
        cases += 1;
    }
    outcome(
        mismatches == 0 && over_budget == 0,
        format!(
            "circuit swap: {cases} cases, {mismatches} disagree with brute force, {over_budget} over ceil(log2(|I|+1))+2 queries, {loops} loops{}",
            first.map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

struct Scaling {
    means: Vec<(usize, f64)>,
    light_deletes: u64,
    light_with_queries: u64,
    width_violations: u64,
}

fn scaling(constraint: Constraint) -> Scaling {
    let mut out = Scaling {
        means: Vec::new(),
        light_deletes: 0,
        light_with_queries: 0,
        width_violations: 0,
    };
    for n in [500usize, 2000, 8000] {
        let (mut queries, mut updates) = (0u64, 0u64);
        for seed in 0..64u64 {
            let problem = generate_problem(constraint, n, 5, seed).unwrap();
            let k = (constraint == Constraint::Cardinality).then_some(5);
            let mut solver =
                Solver::new(&SolverConfig::new(constraint, k, 1.0, seed), &problem).unwrap();
            let width = solver.router().width_bound();
            for ev in generate_stream(n, n, Distribution::RandomMix(0.3), 1000 + seed).unwrap() {
                let light = matches!(ev, Update::Delete(e) if !solver.in_survivor_pools(e));
                let o = solver.update(ev).unwrap();
                if light {
                    out.light_deletes += 1;
                    if o.queries != 0 {
                        out.light_with_queries += 1;
                    }
                }
                if o.touched.len() > width {
                    out.width_violations += 1;
                }
                queries += o.queries;
                updates += 1;
            }
        }
        out.means.push((n, queries as f64 / updates as f64));
    }
    out
}

/// Deletes inside one fixed-guess instance, where elements outside the
/// admission interval never reach `R_1`. Returns (light deletes, light
/// deletes that spent a query).
fn instance_light_deletes<R: dynsub::LevelRule>(
    mut inst: dynsub::LeveledStructure<R>,
    events: &[Update],
) -> (u64, u64) {
    let (mut light, mut billed) = (0, 0);
    for &ev in events {
        match ev {
            Update::Insert(e) => inst.insert(e).unwrap(),
            Update::Delete(e) => {
                let is_light = !inst.in_survivor_pools(e);
                let before = inst.update_queries();
                inst.delete(e).unwrap();
                if is_light {
                    light += 1;
                    if inst.update_queries() != before {
                        billed += 1;
                    }
                }
            }
        }
    }
    (light, billed)
}

fn light_deletes() -> (u64, u64) {
    let (mut light, mut billed) = (0, 0);
    for seed in 0..64u64 {
        let n = 500;
        let problem = generate_problem(Constraint::Matroid, n, 5, seed).unwrap();
        let f = problem.function.build_function().unwrap();
        let m = problem.matroid.as_ref().unwrap().build_matroid().unwrap();
        let events = generate_stream(n, n, Distribution::RandomMix(0.3), 1000 + seed).unwrap();
        let rng = ChaCha8Rng::seed_from_u64(seed);
        let card = CardinalityInstance::for_guess(&f, 5, 128.0, rng.clone()).unwrap();
        let mat = MatroidInstance::for_guess(&f, &m, 16.0, 1.0, rng).unwrap();
        for (l, b) in [
            instance_light_deletes(card, &events),
            instance_light_deletes(mat, &events),
        ] {
            light += l;
            billed += b;
        }
    }
    (light, billed)
}

fn query_scaling(card: &Scaling, mat: &Scaling) -> Outcome {
    let spread = |s: &Scaling| {
        let (lo, hi) = s
            .means
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(_, m)| {
                (lo.min(m), hi.max(m))
            });
        hi / lo
    };
    let fmt = |s: &Scaling| {
        s.means
            .iter()
            .map(|(n, m)| format!("n={n}: {m:.1}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let (sc, sm) = (spread(card), spread(mat));
    let (light, billed) = light_deletes();
    let facade_billed = card.light_with_queries + mat.light_with_queries;
    outcome(
        sc <= 2.0 && sm <= 2.0 && light > 0 && billed + facade_billed == 0,
        format!(
            "query scaling (k=5, eps=1, 64 seeds): cardinality [{}] spread {sc:.2}x; matroid [{}] spread {sm:.2}x; \
             {light} light deletes in fixed-guess instances and {} through the solver, {} spent a query",
            fmt(card),
            fmt(mat),
            card.light_deletes + mat.light_deletes,
            billed + facade_billed
        ),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut results: Vec<(u32, Outcome)> = Vec::new();

    let card = cardinality_runs();
    results.push((
        1,
        approximation("approximation, cardinality", "(2+eps)", &card),
    ));
    let mat = matroid_runs();
    results.push((2, approximation("approximation, matroid", "(4+eps)", &mat)));

    let inv_card = invariant_runs(Constraint::Cardinality);
    let inv_mat = invariant_runs(Constraint::Matroid);
    let small_violations = card.invariant_violations + mat.invariant_violations;
    results.push((
        3,
        outcome(
            inv_card.invariant_violations == 0 && inv_mat.invariant_violations == 0 && small_violations == 0,
            format!(
                "level invariants: {} cardinality and {} matroid updates audited, {} violations ({} more across the exact runs){}",
                inv_card.steps,
                inv_mat.steps,
                inv_card.invariant_violations + inv_mat.invariant_violations,
                small_violations,
                inv_card
                    .first_violation
                    .or(inv_mat.first_violation)
                    .or(card.first_violation.clone())
                    .or(mat.first_violation.clone())
                    .map(|v| format!("; first: {v}"))
                    .unwrap_or_default()
            ),
        ),
    ));
    results.push((4, uniformity()));
    results.push((5, level_counts(&card, &mat)));
    results.push((6, circuit_swaps()));
    results.push((
        7,
        outcome(
            card.placement_mismatches + mat.placement_mismatches == 0
                && card.placements_checked > 0
                && mat.placements_checked > 0,
            format!(
                "binary-search placement: {} placements shadowed by a linear scan, {} mismatches",
                card.placements_checked + mat.placements_checked,
                card.placement_mismatches + mat.placement_mismatches
            ),
        ),
    ));
    let sc = scaling(Constraint::Cardinality);
    let sm = scaling(Constraint::Matroid);
    results.push((8, query_scaling(&sc, &sm)));
    let widths = card.width_violations
        + mat.width_violations
        + inv_card.width_violations
        + inv_mat.width_violations;
    results.push((
        9,
        outcome(
            widths + sc.width_violations + sm.width_violations == 0,
            format!(
                "routing widths: every event within ceil(log_(1+eps)(2k))+1 or ceil(log2(10k/eps))+1; max touched {} (exact runs), {} over",
                card.max_touched.max(mat.max_touched),
                widths + sc.width_violations + sm.width_violations
            ),
        ),
    ));

    let mut failed = 0;
    for (id, o) in &results {
        println!(
            "{} criterion {id}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
