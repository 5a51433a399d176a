//! Dense array plus position map: constant-time insert, remove, membership
//! and uniform sampling. Backs every survivor pool `R_i`.

use std::collections::HashMap;

use rand::Rng;

use crate::element::{ElementId, ElementSet};

#[derive(Debug, Clone, Default)]
pub struct RandomSet {
    dense: Vec<ElementId>,
    position: HashMap<ElementId, usize>,
}

impl RandomSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.dense.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dense.is_empty()
    }

    pub fn contains(&self, e: ElementId) -> bool {
        self.position.contains_key(&e)
    }

    pub fn insert(&mut self, e: ElementId) -> bool {
        if self.position.contains_key(&e) {
            return false;
        }
        self.position.insert(e, self.dense.len());
        self.dense.push(e);
        true
    }

    /// Swap-remove; the last member takes the vacated slot.
    pub fn remove(&mut self, e: ElementId) -> bool {
        let Some(pos) = self.position.remove(&e) else {
            return false;
        };
        let last = self.dense.pop().expect("position map and array agree");
        if last != e {
            self.dense[pos] = last;
            self.position.insert(last, pos);
        }
        true
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<ElementId> {
        if self.dense.is_empty() {
            None
        } else {
            Some(self.dense[rng.gen_range(0..self.dense.len())])
        }
    }

    /// Members in internal order (deterministic for a given operation history).
    pub fn members(&self) -> &[ElementId] {
        &self.dense
    }

    pub fn to_set(&self) -> ElementSet {
        self.dense.iter().copied().collect()
    }

    pub fn clear(&mut self) {
        self.dense.clear();
        self.position.clear();
    }
}

impl FromIterator<ElementId> for RandomSet {
    fn from_iter<I: IntoIterator<Item = ElementId>>(iter: I) -> Self {
        let mut s = RandomSet::new();
        for e in iter {
            s.insert(e);
        }
        s
    }
}
