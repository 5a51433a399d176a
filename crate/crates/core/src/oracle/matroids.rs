use std::collections::HashMap;

use crate::element::ElementId;
use crate::error::{Error, Result};

use super::IndependenceSystem;

/// Every set of size at most `k` is independent.
#[derive(Debug, Clone)]
pub struct Uniform {
    k: usize,
}

impl Uniform {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Validation(
                "uniform matroid rank must be positive".into(),
            ));
        }
        Ok(Uniform { k })
    }
}

impl IndependenceSystem for Uniform {
    fn is_independent(&self, set: &[ElementId]) -> bool {
        set.len() <= self.k
    }

    fn rank(&self) -> usize {
        self.k
    }
}

/// At most `capacities[b]` members from block `b`. Elements outside every
/// block behave as loops.
#[derive(Debug, Clone)]
pub struct Partition {
    block_of: HashMap<ElementId, usize>,
    capacities: Vec<usize>,
    rank: usize,
}

impl Partition {
    pub fn new(blocks: &[Vec<ElementId>], capacities: &[usize]) -> Result<Self> {
        if blocks.len() != capacities.len() {
            return Err(Error::Validation(format!(
                "{} blocks but {} capacities",
                blocks.len(),
                capacities.len()
            )));
        }
        let mut block_of = HashMap::new();
        for (b, members) in blocks.iter().enumerate() {
            for &e in members {
                if let Some(prev) = block_of.insert(e, b) {
                    return Err(Error::Validation(format!(
                        "element {e} appears in blocks {prev} and {b}"
                    )));
                }
            }
        }
        let rank = blocks
            .iter()
            .zip(capacities)
            .map(|(m, &c)| m.len().min(c))
            .sum();
        if rank == 0 {
            return Err(Error::Validation("partition matroid has rank 0".into()));
        }
        Ok(Partition {
            block_of,
            capacities: capacities.to_vec(),
            rank,
        })
    }
}

impl IndependenceSystem for Partition {
    fn is_independent(&self, set: &[ElementId]) -> bool {
        let mut used = vec![0usize; self.capacities.len()];
        for e in set {
            let Some(&b) = self.block_of.get(e) else {
                return false;
            };
            used[b] += 1;
            if used[b] > self.capacities[b] {
                return false;
            }
        }
        true
    }

    fn rank(&self) -> usize {
        self.rank
    }
}

/// Edge sets of a multigraph that contain no cycle. Self-loops are loops of
/// the matroid; unknown edge ids are treated the same way.
#[derive(Debug, Clone)]
pub struct Graphic {
    edges: HashMap<ElementId, (usize, usize)>,
    vertices: usize,
    rank: usize,
}

impl Graphic {
    /// `vertices`, when given, bounds the vertex labels.
    pub fn new(edges: &[(usize, usize, ElementId)], vertices: Option<usize>) -> Result<Self> {
        let inferred = edges
            .iter()
            .map(|&(u, v, _)| u.max(v) + 1)
            .max()
            .unwrap_or(0);
        let vertices = match vertices {
            Some(n) if n < inferred => {
                return Err(Error::Validation(format!(
                    "edge endpoint {} outside {n} declared vertices",
                    inferred - 1
                )))
            }
            Some(n) => n,
            None => inferred,
        };
        let mut map = HashMap::with_capacity(edges.len());
        for &(u, v, id) in edges {
            if map.insert(id, (u, v)).is_some() {
                return Err(Error::Validation(format!("edge id {id} used twice")));
            }
        }
        let mut dsu = Dsu::new(vertices);
        let rank = edges.iter().filter(|&&(u, v, _)| dsu.union(u, v)).count();
        if rank == 0 {
            return Err(Error::Validation("graphic matroid has rank 0".into()));
        }
        Ok(Graphic {
            edges: map,
            vertices,
            rank,
        })
    }
}

impl IndependenceSystem for Graphic {
    fn is_independent(&self, set: &[ElementId]) -> bool {
        if set.len() > self.rank {
            return false;
        }
        let mut dsu = Dsu::new(self.vertices);
        set.iter().all(|e| match self.edges.get(e) {
            Some(&(u, v)) => dsu.union(u, v),
            None => false,
        })
    }

    fn rank(&self) -> usize {
        self.rank
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// `false` when `a` and `b` were already connected (the edge closes a cycle).
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u64]) -> Vec<ElementId> {
        v.iter().map(|&i| ElementId(i)).collect()
    }

    #[test]
    fn uniform_rank_three() {
        let m = Uniform::new(3).unwrap();
        assert!(m.is_independent(&ids(&[1, 2, 3])));
        assert!(!m.is_independent(&ids(&[1, 2, 3, 4])));
        assert!(m.is_independent(&[]));
    }

    #[test]
    fn partition_block_capacity() {
        // blocks {a,b | c}, capacities (1, 1)
        let m = Partition::new(&[ids(&[0, 1]), ids(&[2])], &[1, 1]).unwrap();
        assert!(!m.is_independent(&ids(&[0, 1])));
        assert!(m.is_independent(&ids(&[0, 2])));
        assert_eq!(m.rank(), 2);
        assert!(!m.is_independent(&ids(&[7])));
        assert!(Partition::new(&[ids(&[0]), ids(&[0])], &[1, 1]).is_err());
        assert!(Partition::new(&[ids(&[0])], &[1, 1]).is_err());
    }

    #[test]
    fn graphic_triangle_and_path() {
        let tri = Graphic::new(
            &[
                (0, 1, ElementId(1)),
                (1, 2, ElementId(2)),
                (2, 0, ElementId(3)),
            ],
            None,
        )
        .unwrap();
        assert!(!tri.is_independent(&ids(&[1, 2, 3])));
        assert!(tri.is_independent(&ids(&[1, 3])));
        assert_eq!(tri.rank(), 2);

        let path = Graphic::new(&[(0, 1, ElementId(1)), (1, 2, ElementId(2))], None).unwrap();
        assert!(path.is_independent(&ids(&[1, 2])));

        let with_loop = Graphic::new(&[(0, 1, ElementId(1)), (1, 1, ElementId(2))], None).unwrap();
        assert!(!with_loop.is_independent(&ids(&[2])));
        assert!(Graphic::new(&[(0, 5, ElementId(1))], Some(3)).is_err());
    }
}
