//! Query-counted access to the objective `f` and to the matroid
//! independence test.
//!
//! Every `evaluate` call and every `is_independent` call is billed exactly one
//! query on the handle it was made through. Handles share the underlying
//! function but each owns its counter, so an instance can keep separate
//! handles for maintenance, reporting and auditing and read them apart.

mod functions;
mod matroids;
pub mod spec;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub use functions::{Coverage, CoverageSpec, Modular};
pub use matroids::{Graphic, Partition, Uniform};
pub use spec::{make_coverage_oracle, make_matroid, MatroidKind, OracleSpec, ProblemSpec};

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};

/// A normalized monotone submodular set function over a declared ground set.
pub trait SetFunction: Send + Sync + fmt::Debug {
    /// `f(set)`; members are distinct and belong to the ground set.
    fn value(&self, set: &[ElementId]) -> f64;

    fn contains(&self, e: ElementId) -> bool;

    /// Sorted ground set.
    fn ground_set(&self) -> Vec<ElementId>;
}

/// A downward-closed set system satisfying the exchange axiom.
pub trait IndependenceSystem: Send + Sync + fmt::Debug {
    fn is_independent(&self, set: &[ElementId]) -> bool;

    /// Size of a largest independent set.
    fn rank(&self) -> usize;
}

pub struct SubmodularOracle {
    func: Arc<dyn SetFunction>,
    queries: AtomicU64,
}

impl SubmodularOracle {
    pub fn new(func: Arc<dyn SetFunction>) -> Self {
        SubmodularOracle {
            func,
            queries: AtomicU64::new(0),
        }
    }

    /// A new handle on the same function with its own zeroed counter.
    pub fn handle(&self) -> Self {
        SubmodularOracle::new(Arc::clone(&self.func))
    }

    pub fn function(&self) -> &Arc<dyn SetFunction> {
        &self.func
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn contains(&self, e: ElementId) -> bool {
        self.func.contains(e)
    }

    pub fn ground_set(&self) -> Vec<ElementId> {
        self.func.ground_set()
    }

    pub fn evaluate(&self, set: &ElementSet) -> Result<f64> {
        if let Some(bad) = set.iter().find(|&e| !self.func.contains(e)) {
            return Err(Error::UnknownElement(bad));
        }
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.func.value(set.as_slice()))
    }

    /// `f({e})`
    pub fn singleton(&self, e: ElementId) -> Result<f64> {
        self.evaluate(&ElementSet::from_iter([e]))
    }

    /// `f(S + e) - f(S)`. Two queries, or one when the caller already holds
    /// `f(S)`.
    pub fn marginal_gain(
        &self,
        set: &ElementSet,
        e: ElementId,
        cached: Option<f64>,
    ) -> Result<f64> {
        if set.contains(e) {
            return Err(Error::Precondition(format!(
                "marginal gain of {e} requested w.r.t. a set that contains it"
            )));
        }
        let base = match cached {
            Some(v) => v,
            None => self.evaluate(set)?,
        };
        Ok(self.evaluate(&set.with(e))? - base)
    }
}

impl Clone for SubmodularOracle {
    /// Same function, counter copied.
    fn clone(&self) -> Self {
        SubmodularOracle {
            func: Arc::clone(&self.func),
            queries: AtomicU64::new(self.queries()),
        }
    }
}

impl fmt::Debug for SubmodularOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubmodularOracle")
            .field("func", &self.func)
            .field("queries", &self.queries())
            .finish()
    }
}

pub struct MatroidOracle {
    matroid: Arc<dyn IndependenceSystem>,
    queries: AtomicU64,
}

impl MatroidOracle {
    pub fn new(matroid: Arc<dyn IndependenceSystem>) -> Self {
        MatroidOracle {
            matroid,
            queries: AtomicU64::new(0),
        }
    }

    pub fn handle(&self) -> Self {
        MatroidOracle::new(Arc::clone(&self.matroid))
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn rank(&self) -> usize {
        self.matroid.rank()
    }

    pub fn is_independent(&self, set: &ElementSet) -> bool {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.matroid.is_independent(set.as_slice())
    }
}

impl Clone for MatroidOracle {
    fn clone(&self) -> Self {
        MatroidOracle {
            matroid: Arc::clone(&self.matroid),
            queries: AtomicU64::new(self.queries()),
        }
    }
}

impl fmt::Debug for MatroidOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatroidOracle")
            .field("matroid", &self.matroid)
            .field("queries", &self.queries())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::set_of;

    fn two_covers() -> SubmodularOracle {
        // covers(1) = {a, b}, covers(2) = {b, c} with a=0, b=1, c=2
        make_coverage_oracle(&CoverageSpec {
            universe_size: 3,
            covers: [(ElementId(1), vec![0, 1]), (ElementId(2), vec![1, 2])]
                .into_iter()
                .collect(),
            item_weights: None,
        })
        .unwrap()
    }

    #[test]
    fn evaluate_counts_and_values() {
        let f = two_covers();
        assert_eq!(f.evaluate(&ElementSet::new()).unwrap(), 0.0);
        assert_eq!(f.evaluate(&set_of(&[1, 2])).unwrap(), 3.0);
        assert_eq!(f.queries(), 2);
    }

    #[test]
    fn unknown_element_is_a_domain_error_and_not_billed() {
        let f = two_covers();
        let err = f.evaluate(&set_of(&[1, 9])).unwrap_err();
        assert!(matches!(err, Error::UnknownElement(ElementId(9))));
        assert_eq!(f.queries(), 0);
    }

    #[test]
    fn marginal_gain_billing() {
        let f = two_covers();
        assert_eq!(
            f.marginal_gain(&set_of(&[1]), ElementId(2), None).unwrap(),
            1.0
        );
        assert_eq!(f.queries(), 2);
        assert_eq!(
            f.marginal_gain(&set_of(&[1]), ElementId(2), Some(2.0))
                .unwrap(),
            1.0
        );
        assert_eq!(f.queries(), 3);
        assert_eq!(
            f.marginal_gain(&ElementSet::new(), ElementId(2), Some(0.0))
                .unwrap(),
            f.singleton(ElementId(2)).unwrap()
        );
        assert!(matches!(
            f.marginal_gain(&set_of(&[1]), ElementId(1), None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn handles_share_function_not_counter() {
        let f = two_covers();
        f.evaluate(&set_of(&[1])).unwrap();
        let h = f.handle();
        h.evaluate(&set_of(&[2])).unwrap();
        h.evaluate(&set_of(&[2])).unwrap();
        assert_eq!(f.queries(), 1);
        assert_eq!(h.queries(), 2);
        assert_eq!(h.clone().queries(), 2);
    }

    #[test]
    fn modular_singleton() {
        let f = SubmodularOracle::new(Arc::new(
            Modular::new([(ElementId(4), 5.0)].into_iter().collect()).unwrap(),
        ));
        assert_eq!(f.singleton(ElementId(4)).unwrap(), 5.0);
    }
}
