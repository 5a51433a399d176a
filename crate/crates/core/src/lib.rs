//! Fully dynamic monotone submodular maximization.
//!
//! Elements arrive and leave one at a time. [`Solver`] keeps a
//! `(4+ε)`-approximate independent set under a matroid constraint, or a
//! `(2+ε)`-approximate set of size at most `k` under a cardinality
//! constraint, using an expected number of oracle queries per update that
//! does not depend on the number of elements.
//!
//! ```
//! use dynsub::{Constraint, ProblemSpec, Solver, SolverConfig, ElementId};
//!
//! let problem = ProblemSpec::from_json(
//!     r#"{"type":"coverage","universe":4,"covers":{"1":[0,1],"2":[1,2],"3":[3]}}"#,
//! )?;
//! let mut solver = Solver::new(&SolverConfig::new(Constraint::Cardinality, Some(2), 0.5, 7), &problem)?;
//! for id in [1, 2, 3] {
//!     solver.insert(ElementId(id))?;
//! }
//! solver.delete(ElementId(1))?;
//! let (set, value, _) = solver.solution()?;
//! assert!(set.len() <= 2 && value >= 2.0);
//! # Ok::<(), dynsub::Error>(())
//! ```

pub mod cardinality;
pub mod element;
pub mod error;
pub mod guessing;
pub mod harness;
pub mod invariants;
pub mod leveled;
pub mod matroid;
pub mod oracle;
pub mod random_set;
pub mod reference;
pub mod uniformity;

pub use cardinality::{CardinalityInstance, CardinalityRule, CardinalityState};
pub use element::{set_of, ElementId, ElementSet};
pub use error::{Error, Result};
pub use guessing::{
    Constraint, FamilyStats, GuessFamily, GuessMode, Router, Solver, SolverConfig, Update,
    UpdateOutcome,
};
pub use invariants::{Invariant, InvariantReport, Violation};
pub use leveled::{LevelRule, LeveledStructure};
pub use matroid::{
    find_min_circuit_swap, MatroidInstance, MatroidRule, MatroidState, PromoteResult,
};
pub use oracle::{
    make_coverage_oracle, make_matroid, CoverageSpec, MatroidKind, MatroidOracle, OracleSpec,
    ProblemSpec, SubmodularOracle,
};
pub use random_set::RandomSet;
