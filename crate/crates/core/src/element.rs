use std::fmt;

use serde::{Deserialize, Serialize};

/// Stable identifier of a ground-set member. Re-inserting an element after
/// deleting it reuses the same id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u64);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for ElementId {
    fn from(id: u64) -> Self {
        ElementId(id)
    }
}

/// A small exact set of elements, kept sorted so it can be handed to an
/// oracle as a slice without copying.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElementSet(Vec<ElementId>);

impl ElementSet {
    pub fn new() -> Self {
        ElementSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: ElementId) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    /// Returns `false` if `e` was already present.
    pub fn insert(&mut self, e: ElementId) -> bool {
        match self.0.binary_search(&e) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, e);
                true
            }
        }
    }

    pub fn remove(&mut self, e: ElementId) -> bool {
        match self.0.binary_search(&e) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    /// `self + e`
    pub fn with(&self, e: ElementId) -> ElementSet {
        let mut out = self.clone();
        out.insert(e);
        out
    }

    /// `self - e`
    pub fn without(&self, e: ElementId) -> ElementSet {
        let mut out = self.clone();
        out.remove(e);
        out
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.0.iter().all(|&e| other.contains(e))
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        let mut out = self.clone();
        for e in other.iter() {
            out.insert(e);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[ElementId] {
        &self.0
    }
}

impl FromIterator<ElementId> for ElementSet {
    fn from_iter<I: IntoIterator<Item = ElementId>>(iter: I) -> Self {
        let mut v: Vec<ElementId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ElementSet(v)
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = ElementId;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, ElementId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// Shorthand used throughout tests and examples.
pub fn set_of(ids: &[u64]) -> ElementSet {
    ids.iter().map(|&i| ElementId(i)).collect()
}
