//! Compare the exact optimum with the greedy baselines on a small instance.

use dynsub::harness::{random_coverage, random_partition, CoverageParams};
use dynsub::reference::{brute_force_opt, greedy_cardinality, greedy_matroid, Feasibility};
use dynsub::{make_coverage_oracle, make_matroid, ElementSet};

fn main() -> dynsub::Result<()> {
    let n = 16;
    let f = make_coverage_oracle(&random_coverage(n, CoverageParams::scaled(n), 7)?)?;
    let ground: ElementSet = f.ground_set().into_iter().collect();

    for k in [2, 4, 6] {
        let opt = brute_force_opt(&ground, &f, Feasibility::Cardinality(k))?;
        let greedy = greedy_cardinality(&ground, &f, k)?;
        println!(
            "k={k}: exact {:.1} ({} queries), greedy {:.1} ({} queries)",
            opt.value, opt.queries_used, greedy.value, greedy.queries_used
        );
    }

    let m = make_matroid(&random_partition(n, 4, 1, 7)?)?;
    let opt = brute_force_opt(&ground, &f, Feasibility::Matroid(&m))?;
    let greedy = greedy_matroid(&ground, &f, &m)?;
    println!(
        "partition matroid: exact {:.1} on {}, greedy {:.1} on {}",
        opt.value, opt.set, greedy.value, greedy.set
    );
    Ok(())
}
