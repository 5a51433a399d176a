//! Exhaustive axiom checks on ground sets of at most six elements.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dynsub::harness::{random_coverage, random_graphic, random_partition, CoverageParams};
use dynsub::oracle::Modular;
use dynsub::{
    make_coverage_oracle, make_matroid, ElementId, ElementSet, MatroidKind, MatroidOracle,
    SubmodularOracle,
};

fn subsets(ground: &[ElementId]) -> Vec<ElementSet> {
    (0u32..1 << ground.len())
        .map(|mask| {
            ground
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect()
        })
        .collect()
}

fn assert_submodular(f: &SubmodularOracle) {
    let ground = f.ground_set();
    assert!(ground.len() <= 6);
    let all = subsets(&ground);
    assert_eq!(
        f.evaluate(&ElementSet::new()).unwrap(),
        0.0,
        "normalization"
    );
    for b in &all {
        let fb = f.evaluate(b).unwrap();
        for a in all.iter().filter(|a| a.is_subset(b)) {
            let fa = f.evaluate(a).unwrap();
            assert!(fa <= fb, "monotone: f({a}) = {fa} > f({b}) = {fb}");
            for &e in ground.iter().filter(|&&e| !b.contains(e)) {
                let ga = f.evaluate(&a.with(e)).unwrap() - fa;
                let gb = f.evaluate(&b.with(e)).unwrap() - fb;
                assert!(
                    ga >= gb,
                    "submodular: gain of {e} over {a} is {ga} < {gb} over {b}"
                );
            }
        }
    }
}

fn assert_matroid(m: &MatroidOracle, ground: &[ElementId]) {
    let all = subsets(ground);
    assert!(m.is_independent(&ElementSet::new()));
    let independent: Vec<&ElementSet> = all.iter().filter(|s| m.is_independent(s)).collect();
    for s in &independent {
        assert!(s.len() <= m.rank(), "{s} larger than rank {}", m.rank());
        for x in s.iter() {
            assert!(
                m.is_independent(&s.without(x)),
                "downward closure fails below {s}"
            );
        }
    }
    for a in &independent {
        for b in independent.iter().filter(|b| b.len() > a.len()) {
            assert!(
                b.iter()
                    .any(|x| !a.contains(x) && m.is_independent(&a.with(x))),
                "exchange fails for {a}, {b}"
            );
        }
    }
    assert_eq!(
        independent.iter().map(|s| s.len()).max(),
        Some(m.rank()),
        "rank is attained"
    );
}

#[test]
fn coverage_families_are_monotone_submodular() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..25 {
        let n = rng.gen_range(1..=6);
        let params = CoverageParams {
            universe: rng.gen_range(1..=8),
            items_per_element: rng.gen_range(1..=4),
            max_item_weight: 7,
        };
        assert_submodular(
            &make_coverage_oracle(&random_coverage(n, params, rng.gen()).unwrap()).unwrap(),
        );
    }
}

#[test]
fn modular_is_monotone_submodular() {
    let f = SubmodularOracle::new(Arc::new(
        Modular::new((1..=6).map(|e| (ElementId(e), e as f64 * 1.5)).collect()).unwrap(),
    ));
    assert_submodular(&f);
}

#[test]
fn coverage_special_cases() {
    // empty covers give the zero function
    let zero = make_coverage_oracle(&dynsub::CoverageSpec {
        universe_size: 2,
        covers: (1..=3).map(|e| (ElementId(e), vec![])).collect(),
        item_weights: None,
    })
    .unwrap();
    for s in subsets(&zero.ground_set()) {
        assert_eq!(zero.evaluate(&s).unwrap(), 0.0);
    }
    // every element covers the single item
    let full = make_coverage_oracle(&dynsub::CoverageSpec {
        universe_size: 1,
        covers: (1..=3).map(|e| (ElementId(e), vec![0])).collect(),
        item_weights: None,
    })
    .unwrap();
    for s in subsets(&full.ground_set()) {
        assert_eq!(
            full.evaluate(&s).unwrap(),
            if s.is_empty() { 0.0 } else { 1.0 }
        );
    }
    // disjoint singletons are modular with unit values
    let disjoint = make_coverage_oracle(&dynsub::CoverageSpec {
        universe_size: 4,
        covers: (0..4).map(|i| (ElementId(i as u64 + 1), vec![i])).collect(),
        item_weights: None,
    })
    .unwrap();
    for s in subsets(&disjoint.ground_set()) {
        assert_eq!(disjoint.evaluate(&s).unwrap(), s.len() as f64);
    }
}

#[test]
fn negative_weights_are_rejected() {
    let spec = dynsub::CoverageSpec {
        universe_size: 2,
        covers: [(ElementId(1), vec![0])].into_iter().collect(),
        item_weights: Some(vec![1.0, -1.0]),
    };
    assert!(matches!(
        make_coverage_oracle(&spec),
        Err(dynsub::Error::Validation(_))
    ));
}

#[test]
fn matroid_families_satisfy_axioms() {
    let ground: Vec<ElementId> = (1..=6).map(ElementId).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 1..=6 {
        assert_matroid(&make_matroid(&MatroidKind::Uniform(k)).unwrap(), &ground);
    }
    for _ in 0..20 {
        let kind =
            random_partition(6, rng.gen_range(1..=4), rng.gen_range(1..=3), rng.gen()).unwrap();
        assert_matroid(&make_matroid(&kind).unwrap(), &ground);
        let kind = random_graphic(6, rng.gen_range(2..=6), rng.gen()).unwrap();
        assert_matroid(&make_matroid(&kind).unwrap(), &ground);
    }
}

#[test]
fn counters_match_an_independent_tally() {
    let f =
        make_coverage_oracle(&random_coverage(6, CoverageParams::scaled(6), 3).unwrap()).unwrap();
    let m = make_matroid(&MatroidKind::Uniform(3)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut evals, mut tests) = (0u64, 0u64);
    let ground = f.ground_set();
    let all = subsets(&ground);
    for _ in 0..500 {
        let s = &all[rng.gen_range(0..all.len())];
        match rng.gen_range(0..3) {
            0 => {
                f.evaluate(s).unwrap();
                evals += 1;
            }
            1 => {
                let Some(e) = ground.iter().copied().find(|&e| !s.contains(e)) else {
                    continue;
                };
                let cached = rng.gen_bool(0.5).then_some(0.0);
                f.marginal_gain(s, e, cached).unwrap();
                evals += if cached.is_some() { 1 } else { 2 };
            }
            _ => {
                m.is_independent(s);
                tests += 1;
            }
        }
    }
    assert_eq!(f.queries(), evals);
    assert_eq!(m.queries(), tests);
}
