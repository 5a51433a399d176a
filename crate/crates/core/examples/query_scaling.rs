//! Mean queries per update as the ground set grows.

use dynsub::harness::{generate_problem, generate_stream, Distribution};
use dynsub::{Constraint, Solver, SolverConfig};

fn main() -> dynsub::Result<()> {
    for constraint in [Constraint::Cardinality, Constraint::Matroid] {
        for n in [250, 1000, 4000] {
            let problem = generate_problem(constraint, n, 4, 11)?;
            let events = generate_stream(n, n, Distribution::RandomMix(0.3), 11)?;
            let mut total = 0.0;
            let seeds = 8;
            for seed in 0..seeds {
                let mut solver =
                    Solver::new(&SolverConfig::new(constraint, Some(4), 0.5, seed), &problem)?;
                for &ev in &events {
                    solver.update(ev)?;
                }
                total += solver.stats().update_queries as f64 / events.len() as f64;
            }
            println!(
                "{:12} n={n:5}: {:.1} queries per update",
                constraint.to_string(),
                total / seeds as f64
            );
        }
    }
    Ok(())
}
