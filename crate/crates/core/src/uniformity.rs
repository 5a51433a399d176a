//! Statistical check that a rebuilt level samples `e_i` uniformly from `R_i`.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::element::ElementId;
use crate::error::{Error, Result};
use crate::leveled::{LevelRule, LeveledStructure};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityReport {
    pub level: usize,
    pub pool: Vec<ElementId>,
    pub trials: usize,
    pub counts: Vec<u64>,
    pub chi_square: f64,
    pub p_value: f64,
}

impl UniformityReport {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

/// Pearson statistic and upper-tail p-value of `counts` against the uniform
/// distribution.
pub fn chi_square_uniform(counts: &[u64]) -> Result<(f64, f64)> {
    if counts.len() < 2 {
        return Err(Error::Precondition(
            "a goodness-of-fit test needs at least two categories".into(),
        ));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Precondition("no observations".into()));
    }
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).expect("positive degrees of freedom");
    Ok((stat, dist.sf(stat)))
}

/// Re-runs `construct_level(level)` on reseeded copies and tallies which
/// member of `R_level` becomes `e_level`.
pub fn rebuild_trials<R: LevelRule>(
    inst: &LeveledStructure<R>,
    level: usize,
    trials: usize,
    seed: u64,
) -> Result<UniformityReport> {
    let pool = inst
        .survivors(level)
        .filter(|_| level >= 1 && level <= inst.level_count())
        .ok_or_else(|| Error::Precondition(format!("level {level} is not a built level")))?;
    let mut members: Vec<ElementId> = pool.members().to_vec();
    members.sort_unstable();
    let mut counts = vec![0u64; members.len()];
    for t in 0..trials {
        let chosen = inst
            .rebuild_choice(level, seed.wrapping_add(t as u64))?
            .ok_or_else(|| {
                Error::Precondition(format!("rebuilding level {level} chose nothing"))
            })?;
        let idx = members.binary_search(&chosen).map_err(|_| {
            Error::Precondition(format!("rebuild chose {chosen}, which is not in R_{level}"))
        })?;
        counts[idx] += 1;
    }
    let (chi_square, p_value) = chi_square_uniform(&counts)?;
    Ok(UniformityReport {
        level,
        pool: members,
        trials,
        counts,
        chi_square,
        p_value,
    })
}
