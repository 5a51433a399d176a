use std::collections::{BTreeMap, HashMap};

use crate::element::ElementId;
use crate::error::{Error, Result};

use super::SetFunction;

/// Weighted coverage: `f(S)` is the total weight of the universe items
/// covered by at least one member of `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageSpec {
    pub universe_size: usize,
    pub covers: BTreeMap<ElementId, Vec<usize>>,
    /// One weight per universe item; `None` means unit weights.
    pub item_weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Coverage {
    universe_size: usize,
    covers: HashMap<ElementId, Vec<usize>>,
    weights: Vec<f64>,
    ground: Vec<ElementId>,
}

impl Coverage {
    pub fn new(spec: &CoverageSpec) -> Result<Self> {
        if spec.universe_size == 0 {
            return Err(Error::Validation(
                "coverage universe must be nonempty".into(),
            ));
        }
        let weights = match &spec.item_weights {
            Some(w) => {
                if w.len() != spec.universe_size {
                    return Err(Error::Validation(format!(
                        "{} item weights given for a universe of {}",
                        w.len(),
                        spec.universe_size
                    )));
                }
                if let Some((i, v)) = w
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
                {
                    return Err(Error::Validation(format!(
                        "item {i} has invalid weight {v}"
                    )));
                }
                w.clone()
            }
            None => vec![1.0; spec.universe_size],
        };
        let mut covers = HashMap::with_capacity(spec.covers.len());
        for (&e, items) in &spec.covers {
            if let Some(&bad) = items.iter().find(|&&it| it >= spec.universe_size) {
                return Err(Error::Validation(format!(
                    "element {e} covers item {bad} outside universe of size {}",
                    spec.universe_size
                )));
            }
            let mut items = items.clone();
            items.sort_unstable();
            items.dedup();
            covers.insert(e, items);
        }
        Ok(Coverage {
            universe_size: spec.universe_size,
            ground: spec.covers.keys().copied().collect(),
            covers,
            weights,
        })
    }
}

impl SetFunction for Coverage {
    fn value(&self, set: &[ElementId]) -> f64 {
        let mut seen = vec![0u64; self.universe_size.div_ceil(64)];
        let mut total = 0.0;
        for e in set {
            for &item in &self.covers[e] {
                let (word, bit) = (item / 64, 1u64 << (item % 64));
                if seen[word] & bit == 0 {
                    seen[word] |= bit;
                    total += self.weights[item];
                }
            }
        }
        total
    }

    fn contains(&self, e: ElementId) -> bool {
        self.covers.contains_key(&e)
    }

    fn ground_set(&self) -> Vec<ElementId> {
        self.ground.clone()
    }
}

/// Additive function `f(S) = Σ value(e)`.
#[derive(Debug, Clone)]
pub struct Modular {
    values: HashMap<ElementId, f64>,
    ground: Vec<ElementId>,
}

impl Modular {
    pub fn new(values: BTreeMap<ElementId, f64>) -> Result<Self> {
        if let Some((e, v)) = values.iter().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Validation(format!(
                "element {e} has invalid value {v}"
            )));
        }
        Ok(Modular {
            ground: values.keys().copied().collect(),
            values: values.into_iter().collect(),
        })
    }
}

impl SetFunction for Modular {
    fn value(&self, set: &[ElementId]) -> f64 {
        set.iter().map(|e| self.values[e]).sum()
    }

    fn contains(&self, e: ElementId) -> bool {
        self.values.contains_key(&e)
    }

    fn ground_set(&self) -> Vec<ElementId> {
        self.ground.clone()
    }
}
