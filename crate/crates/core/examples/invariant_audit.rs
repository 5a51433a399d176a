//! Check a single instance's invariants, then break it on purpose.

use dynsub::harness::{random_coverage, CoverageParams};
use dynsub::{make_coverage_oracle, CardinalityInstance, Invariant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dynsub::Result<()> {
    let f = make_coverage_oracle(&random_coverage(30, CoverageParams::scaled(30), 5)?)?;
    let mut inst = CardinalityInstance::for_guess(&f, 4, 24.0, ChaCha8Rng::seed_from_u64(5))?;
    inst.init(f.ground_set())?;

    let report = inst.check_invariants()?;
    println!(
        "{} levels, checked {:?}: passed {}",
        inst.level_count(),
        report.checked,
        report.passed()
    );
    println!(
        "maintenance queries {}, audit queries {}",
        inst.update_queries(),
        inst.audit_queries()
    );

    let level = 1;
    let victim = inst.survivors(level).and_then(|r| {
        r.members()
            .iter()
            .copied()
            .find(|&e| Some(e) != inst.chosen(level))
    });
    if let Some(e) = victim {
        inst.corrupt_remove_survivor(level, e);
        let report = inst.check_invariants()?;
        println!(
            "after dropping {e} from R_{level}: survivor invariant holds {}",
            report.holds(Invariant::Survivor)
        );
        for v in &report.violations {
            println!("  {v:?}");
        }
    }
    Ok(())
}
