use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Invariant {
    Starter,
    Survivor,
    Independent,
    Weight,
    Cardinality,
    Terminator,
    /// Stored per-level objective values match a fresh evaluation.
    Cache,
    /// `T` within the level-count bound of the constraint.
    LevelCount,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Invariant::Starter => "starter",
            Invariant::Survivor => "survivor",
            Invariant::Independent => "independent",
            Invariant::Weight => "weight",
            Invariant::Cardinality => "cardinality",
            Invariant::Terminator => "terminator",
            Invariant::Cache => "cache",
            Invariant::LevelCount => "level-count",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub invariant: Invariant,
    pub level: usize,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violated at level {}: {}",
            self.invariant, self.level, self.detail
        )
    }
}

/// Outcome of a first-principles audit: which invariants were checked and
/// the first counterexample found for each failing one.
#[derive(Debug, Clone, Default, Serialize)]
pub struct InvariantReport {
    pub checked: Vec<Invariant>,
    pub violations: Vec<Violation>,
}

impl InvariantReport {
    pub fn new(checked: &[Invariant]) -> Self {
        InvariantReport {
            checked: checked.to_vec(),
            violations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn holds(&self, inv: Invariant) -> bool {
        self.checked.contains(&inv) && self.violations.iter().all(|v| v.invariant != inv)
    }

    /// Records a violation unless one is already recorded for `inv`.
    pub fn fail(&mut self, inv: Invariant, level: usize, detail: impl Into<String>) {
        if self.violations.iter().any(|v| v.invariant == inv) {
            return;
        }
        self.violations.push(Violation {
            invariant: inv,
            level,
            detail: detail.into(),
        });
    }
}
