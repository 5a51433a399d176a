//! Keep a set of at most k elements under a sliding window of coverage elements.

use dynsub::harness::{generate_problem, generate_stream, Distribution};
use dynsub::reference::greedy_cardinality;
use dynsub::{Constraint, ElementSet, Solver, SolverConfig, Update};

fn main() -> dynsub::Result<()> {
    let (n, k) = (400, 6);
    let problem = generate_problem(Constraint::Cardinality, n, k, 1)?;
    let events = generate_stream(n, 2 * n, Distribution::SlidingWindow(80), 1)?;
    let mut solver = Solver::new(
        &SolverConfig::new(Constraint::Cardinality, Some(k), 0.25, 42),
        &problem,
    )?;
    let mut alive = ElementSet::new();

    for (t, &ev) in events.iter().enumerate() {
        let outcome = solver.update(ev)?;
        match ev {
            Update::Insert(e) => alive.insert(e),
            Update::Delete(e) => alive.remove(e),
        };
        if t % 100 == 99 {
            let (set, value, best) = solver.solution()?;
            let greedy = greedy_cardinality(&alive, solver.function(), k)?;
            println!(
                "t={:4} alive={:3} |S|={} f(S)={:6.1} greedy={:6.1} guess index {:?}, last update cost {} queries",
                t + 1,
                alive.len(),
                set.len(),
                value,
                greedy.value,
                best,
                outcome.queries
            );
        }
    }
    let stats = solver.stats();
    println!(
        "{} updates, {:.1} queries per update on average, {} live instances",
        events.len(),
        stats.update_queries as f64 / events.len() as f64,
        stats.live_instances
    );
    Ok(())
}
