use std::collections::BTreeSet;
use std::sync::OnceLock;

use crate::core::VertexSet;
use crate::{Error, Result};

/// An undirected graph on vertices `0..n` with a canonical (sorted,
/// duplicate-free) edge list of 2-subsets. Immutable after construction.
#[derive(Debug, Default)]
pub struct Graph {
    n: usize,
    edges: Vec<[usize; 2]>,
    rows: OnceLock<Vec<VertexSet>>,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        Graph {
            n: self.n,
            edges: self.edges.clone(),
            rows: OnceLock::new(),
        }
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}
impl Eq for Graph {}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::domain(format!("loop edge at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::domain(format!(
                    "edge ({a},{b}) out of vertex range 0..{n}"
                )));
            }
            set.insert([a.min(b), a.max(b)]);
        }
        Ok(Graph {
            n,
            edges: set.into_iter().collect(),
            rows: OnceLock::new(),
        })
    }

    pub fn edgeless(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            rows: OnceLock::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push([a, b]);
            }
        }
        Graph {
            n,
            edges,
            rows: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        self.edges.binary_search(&[a.min(b), a.max(b)]).is_ok()
    }

    /// Adjacency rows as bitsets, built on first use.
    pub fn rows(&self) -> &[VertexSet] {
        self.rows.get_or_init(|| {
            let mut rows = vec![VertexSet::new(); self.n];
            for &[a, b] in &self.edges {
                rows[a].insert(b);
                rows[b].insert(a);
            }
            rows
        })
    }

    pub fn neighborhood(&self, v: usize) -> Result<VertexSet> {
        if v >= self.n {
            return Err(Error::domain(format!("vertex {v} out of range 0..{}", self.n)));
        }
        Ok(self.rows()[v].clone())
    }

    /// Induced subgraph on `s`, re-indexed canonically; returns the new->old
    /// index map.
    pub fn induced(&self, s: &VertexSet) -> Result<(Graph, Vec<usize>)> {
        if !s.within_range(self.n) {
            return Err(Error::domain("induced set outside vertex range".to_string()));
        }
        let map = s.to_vec();
        let mut inv = vec![usize::MAX; self.n];
        for (new, &old) in map.iter().enumerate() {
            inv[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|[a, b]| s.contains(*a) && s.contains(*b))
            .map(|[a, b]| [inv[*a], inv[*b]])
            .collect();
        Ok((
            Graph {
                n: map.len(),
                edges,
                rows: OnceLock::new(),
            },
            map,
        ))
    }

    /// Complement graph over the same vertex range.
    pub fn complement(&self) -> Graph {
        let mut edges = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !self.has_edge(a, b) {
                    edges.push([a, b]);
                }
            }
        }
        Graph {
            n: self.n,
            edges,
            rows: OnceLock::new(),
        }
    }
}

/// A 3-uniform hypergraph on vertices `0..n` with a canonical edge list of
/// 3-subsets. Immutable after construction.
#[derive(Debug, Default)]
pub struct ThreeGraph {
    n: usize,
    edges: Vec<[usize; 3]>,
    links: OnceLock<Vec<Vec<[usize; 2]>>>,
}

impl Clone for ThreeGraph {
    fn clone(&self) -> Self {
        ThreeGraph {
            n: self.n,
            edges: self.edges.clone(),
            links: OnceLock::new(),
        }
    }
}

impl PartialEq for ThreeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}
impl Eq for ThreeGraph {}

impl ThreeGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b, c) in edges {
            if a == b || b == c || a == c {
                return Err(Error::domain(format!(
                    "edge ({a},{b},{c}) has repeated endpoints"
                )));
            }
            if a >= n || b >= n || c >= n {
                return Err(Error::domain(format!(
                    "edge ({a},{b},{c}) out of vertex range 0..{n}"
                )));
            }
            let mut e = [a, b, c];
            e.sort_unstable();
            set.insert(e);
        }
        Ok(ThreeGraph {
            n,
            edges: set.into_iter().collect(),
            links: OnceLock::new(),
        })
    }

    pub fn edgeless(n: usize) -> Self {
        ThreeGraph {
            n,
            edges: Vec::new(),
            links: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[[usize; 3]] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize, c: usize) -> bool {
        if a == b || b == c || a == c {
            return false;
        }
        let mut e = [a, b, c];
        e.sort_unstable();
        self.edges.binary_search(&e).is_ok()
    }

    /// Per-vertex links: the pairs completing each vertex to an edge.
    pub fn links(&self) -> &[Vec<[usize; 2]>] {
        self.links.get_or_init(|| {
            let mut links = vec![Vec::new(); self.n];
            for &[a, b, c] in &self.edges {
                links[a].push([b, c]);
                links[b].push([a, c]);
                links[c].push([a, b]);
            }
            links
        })
    }

    /// `{z : vwz is an edge}`.
    pub fn pair_neighborhood(&self, v: usize, w: usize) -> Result<VertexSet> {
        if v >= self.n || w >= self.n {
            return Err(Error::domain(format!(
                "pair ({v},{w}) out of vertex range 0..{}",
                self.n
            )));
        }
        if v == w {
            return Err(Error::domain("pair neighborhood of a repeated vertex".to_string()));
        }
        let mut out = VertexSet::new();
        for &[a, b] in &self.links()[v] {
            if a == w {
                out.insert(b);
            } else if b == w {
                out.insert(a);
            }
        }
        Ok(out)
    }

    pub fn induced(&self, s: &VertexSet) -> Result<(ThreeGraph, Vec<usize>)> {
        if !s.within_range(self.n) {
            return Err(Error::domain("induced set outside vertex range".to_string()));
        }
        let map = s.to_vec();
        let mut inv = vec![usize::MAX; self.n];
        for (new, &old) in map.iter().enumerate() {
            inv[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|[a, b, c]| s.contains(*a) && s.contains(*b) && s.contains(*c))
            .map(|[a, b, c]| {
                let mut e = [inv[*a], inv[*b], inv[*c]];
                e.sort_unstable();
                e
            })
            .collect();
        Ok((
            ThreeGraph {
                n: map.len(),
                edges,
                links: OnceLock::new(),
            },
            map,
        ))
    }
}

/// `K_2[x, y]`: all 2-subsets with one element in each set.
pub fn k2_product(x: &VertexSet, y: &VertexSet) -> Vec<[usize; 2]> {
    let mut out = BTreeSet::new();
    for a in x.iter() {
        for b in y.iter() {
            if a != b {
                out.insert([a.min(b), a.max(b)]);
            }
        }
    }
    out.into_iter().collect()
}

/// `K_3[x, y, z]`: all 3-subsets meeting each set.
pub fn k3_product(x: &VertexSet, y: &VertexSet, z: &VertexSet) -> Vec<[usize; 3]> {
    let mut out = BTreeSet::new();
    for a in x.iter() {
        for b in y.iter() {
            if b == a {
                continue;
            }
            for c in z.iter() {
                if c == a || c == b {
                    continue;
                }
                let mut e = [a, b, c];
                e.sort_unstable();
                out.insert(e);
            }
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_canonicalization() {
        let g = Graph::new(4, [(1, 0), (0, 1), (3, 2)]).unwrap();
        assert_eq!(g.edges(), &[[0, 1], [2, 3]]);
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(0, 2));
        assert!(Graph::new(2, [(0, 0)]).is_err());
        assert!(Graph::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn neighborhoods() {
        let g = Graph::new(4, [(0, 1), (0, 2)]).unwrap();
        assert_eq!(g.neighborhood(0).unwrap().to_vec(), vec![1, 2]);
        assert_eq!(g.neighborhood(3).unwrap().len(), 0);
        assert!(g.neighborhood(4).is_err());
    }

    #[test]
    fn induced_reindexes() {
        let g = Graph::complete(4);
        let (sub, map) = g.induced(&VertexSet::from_iter([0, 1])).unwrap();
        assert_eq!(sub.n(), 2);
        assert_eq!(sub.edges(), &[[0, 1]]);
        assert_eq!(map, vec![0, 1]);

        let (sub, map) = g.induced(&VertexSet::from_iter([1, 3])).unwrap();
        assert_eq!(sub.edges(), &[[0, 1]]);
        assert_eq!(map, vec![1, 3]);
    }

    #[test]
    fn threegraph_basics() {
        let h = ThreeGraph::new(4, [(2, 1, 0), (0, 1, 3)]).unwrap();
        assert_eq!(h.edges(), &[[0, 1, 2], [0, 1, 3]]);
        assert!(h.has_edge(3, 0, 1));
        assert_eq!(h.pair_neighborhood(0, 1).unwrap().to_vec(), vec![2, 3]);
        assert_eq!(h.pair_neighborhood(1, 2).unwrap().to_vec(), vec![0]);
        assert!(ThreeGraph::new(3, [(0, 1, 1)]).is_err());

        let (sub, _) = h.induced(&VertexSet::from_iter([0, 1, 2])).unwrap();
        assert_eq!(sub.edges(), &[[0, 1, 2]]);
    }

    #[test]
    fn products() {
        let x = VertexSet::from_iter([0]);
        let y = VertexSet::from_iter([1]);
        let z = VertexSet::from_iter([2]);
        assert_eq!(k3_product(&x, &y, &z), vec![[0, 1, 2]]);
        // overlapping sets drop degenerate tuples
        let w = VertexSet::from_iter([0, 1]);
        assert_eq!(k2_product(&w, &w), vec![[0, 1]]);
    }
}
