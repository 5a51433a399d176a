//! Maintain an independent set in a graphic matroid while edges come and go.

use dynsub::harness::{
    generate_stream, random_coverage, random_graphic, CoverageParams, Distribution,
};
use dynsub::{make_coverage_oracle, make_matroid, Constraint, Solver, SolverConfig};

fn main() -> dynsub::Result<()> {
    let n = 300;
    let f = make_coverage_oracle(&random_coverage(n, CoverageParams::scaled(n), 3)?)?;
    // a forest on 12 vertices has at most 11 edges
    let m = make_matroid(&random_graphic(n, 12, 3)?)?;
    let mut solver = Solver::with_oracles(
        &SolverConfig::new(Constraint::Matroid, None, 0.5, 9),
        f,
        Some(m),
    )?;
    println!("rank {}", solver.k());

    for (t, ev) in generate_stream(n, 3 * n, Distribution::RandomMix(0.35), 3)?
        .into_iter()
        .enumerate()
    {
        solver.update(ev)?;
        if t % 150 == 149 {
            let (set, value, _) = solver.solution()?;
            let independent = solver.matroid().is_some_and(|m| m.is_independent(&set));
            println!(
                "t={:4} |S|={:2} f(S)={:6.1} independent={independent}",
                t + 1,
                set.len(),
                value
            );
        }
    }
    for (index, levels) in solver.level_counts() {
        println!("instance {index:3}: {levels} levels");
    }
    let failed = solver
        .check_all()?
        .into_iter()
        .filter(|(_, r)| !r.passed())
        .count();
    println!("instances failing their invariants: {failed}");
    Ok(())
}
