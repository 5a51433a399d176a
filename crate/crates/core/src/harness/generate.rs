//! Seeded random problem instances over ids `1..=n`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::element::ElementId;
use crate::error::{Error, Result};
use crate::guessing::Constraint;
use crate::oracle::{CoverageSpec, MatroidKind, OracleSpec, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageParams {
    pub universe: usize,
    pub items_per_element: usize,
    /// Item weights are drawn from `1..=max_item_weight`.
    pub max_item_weight: u32,
}

impl CoverageParams {
    /// Universe proportional to `n`, so singleton values follow the same
    /// distribution at every scale.
    pub fn scaled(n: usize) -> Self {
        CoverageParams {
            universe: (2 * n).max(8),
            items_per_element: 4,
            max_item_weight: 10,
        }
    }
}

pub fn random_coverage(n: usize, params: CoverageParams, seed: u64) -> Result<CoverageSpec> {
    if params.universe == 0 || params.items_per_element == 0 || params.max_item_weight == 0 {
        return Err(Error::Validation(
            "coverage parameters must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per = params.items_per_element.min(params.universe);
    let items: Vec<usize> = (0..params.universe).collect();
    let covers: BTreeMap<ElementId, Vec<usize>> = (1..=n as u64)
        .map(|id| {
            let mut chosen: Vec<usize> = items.choose_multiple(&mut rng, per).copied().collect();
            chosen.sort_unstable();
            (ElementId(id), chosen)
        })
        .collect();
    let weights = (0..params.universe)
        .map(|_| rng.gen_range(1..=params.max_item_weight) as f64)
        .collect();
    Ok(CoverageSpec {
        universe_size: params.universe,
        covers,
        item_weights: Some(weights),
    })
}

/// Ids `1..=n` spread over `blocks` blocks uniformly at random, each block
/// taking at most `capacity` members.
pub fn random_partition(
    n: usize,
    blocks: usize,
    capacity: usize,
    seed: u64,
) -> Result<MatroidKind> {
    if blocks == 0 || capacity == 0 || n == 0 {
        return Err(Error::Validation(
            "partition parameters must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members = vec![Vec::new(); blocks];
    for id in 1..=n as u64 {
        members[rng.gen_range(0..blocks)].push(ElementId(id));
    }
    Ok(MatroidKind::Partition {
        blocks: members,
        capacities: vec![capacity; blocks],
    })
}

/// Ids `1..=n` as random edges of a multigraph on `vertices` vertices; no
/// self-loops, parallel edges allowed.
pub fn random_graphic(n: usize, vertices: usize, seed: u64) -> Result<MatroidKind> {
    if vertices < 2 || n == 0 {
        return Err(Error::Validation(
            "a graphic matroid needs two vertices and one edge".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (1..=n as u64)
        .map(|id| {
            let u = rng.gen_range(0..vertices);
            let v = (u + rng.gen_range(1..vertices)) % vertices;
            (u, v, ElementId(id))
        })
        .collect();
    Ok(MatroidKind::Graphic {
        edges,
        vertices: Some(vertices),
    })
}

/// Coverage objective over `1..=n`; under a matroid constraint a partition
/// matroid with `k` blocks of capacity one, id `i` in block `i mod k`.
pub fn generate_problem(
    constraint: Constraint,
    n: usize,
    k: usize,
    seed: u64,
) -> Result<ProblemSpec> {
    if k == 0 {
        return Err(Error::Validation("k must be positive".into()));
    }
    let function = OracleSpec::coverage(&random_coverage(n, CoverageParams::scaled(n), seed)?);
    let matroid = match constraint {
        Constraint::Cardinality => None,
        Constraint::Matroid => {
            let mut blocks = vec![Vec::new(); k];
            for id in 1..=n as u64 {
                blocks[(id % k as u64) as usize].push(ElementId(id));
            }
            Some(OracleSpec::matroid(&MatroidKind::Partition {
                blocks,
                capacities: vec![1; k],
            }))
        }
    };
    Ok(ProblemSpec { function, matroid })
}
