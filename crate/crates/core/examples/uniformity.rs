//! Rebuild a level many times and test that the chosen element is uniform over its pool.

use dynsub::harness::{generate_problem, generate_stream, Distribution};
use dynsub::{Constraint, Solver, SolverConfig};

fn main() -> dynsub::Result<()> {
    let problem = generate_problem(Constraint::Cardinality, 200, 5, 2)?;
    let mut solver = Solver::new(
        &SolverConfig::new(Constraint::Cardinality, Some(5), 0.5, 2),
        &problem,
    )?;
    for ev in generate_stream(200, 300, Distribution::RandomMix(0.2), 2)? {
        solver.update(ev)?;
    }
    let report = solver.uniformity(None, 4000, 17)?;
    println!(
        "level {} with |R| = {}: chi-square {:.2}, p = {:.3}",
        report.level,
        report.pool.len(),
        report.chi_square,
        report.p_value
    );
    println!("counts {:?}", report.counts);
    println!("uniform at 0.001: {}", report.passes(1e-3));
    Ok(())
}
