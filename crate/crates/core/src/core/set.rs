use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A set of vertex indices with bitset semantics. The word vector carries no
/// trailing zero words, so equal sets have equal representations.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet {
    words: Vec<u64>,
}

impl VertexSet {
    pub fn new() -> Self {
        VertexSet { words: Vec::new() }
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::new();
        for v in iter {
            s.insert(v);
        }
        s
    }

    pub fn singleton(v: usize) -> Self {
        Self::from_iter([v])
    }

    /// Full range `0..n`.
    pub fn full(n: usize) -> Self {
        Self::from_iter(0..n)
    }

    pub fn insert(&mut self, v: usize) {
        let w = v / 64;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1u64 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        let w = v / 64;
        if w < self.words.len() {
            self.words[w] &= !(1u64 << (v % 64));
            self.trim();
        }
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        let w = v / 64;
        w < self.words.len() && self.words[w] & (1u64 << (v % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn max_elem(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - last.leading_zeros() as usize)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut words: Vec<u64> = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| a & b)
            .collect();
        while words.last() == Some(&0) {
            words.pop();
        }
        VertexSet { words }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let (long, short) = if self.words.len() >= other.words.len() {
            (&self.words, &other.words)
        } else {
            (&other.words, &self.words)
        };
        let mut words = long.clone();
        for (i, w) in short.iter().enumerate() {
            words[i] |= w;
        }
        VertexSet { words }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut words = self.words.clone();
        for (i, w) in other.words.iter().enumerate() {
            if i < words.len() {
                words[i] &= !w;
            }
        }
        while words.last() == Some(&0) {
            words.pop();
        }
        VertexSet { words }
    }

    pub fn intersect_count(&self, other: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        if self.words.len() > other.words.len() {
            return false;
        }
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    /// All members below `n`, i.e. valid indices of an `n`-vertex host.
    pub fn within_range(&self, n: usize) -> bool {
        self.max_elem().map_or(true, |m| m < n)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::from_iter(iter)
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<usize> = Vec::deserialize(d)?;
        Ok(VertexSet::from_iter(v))
    }
}

/// An ordered list of nonempty, pairwise disjoint vertex sets covering
/// `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    parts: Vec<VertexSet>,
}

impl Partition {
    /// Validates the cover/disjointness/nonemptiness invariants.
    pub fn new(n: usize, parts: Vec<VertexSet>) -> Result<Self> {
        let mut seen = VertexSet::new();
        let mut total = 0usize;
        for (i, p) in parts.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::domain(format!("partition part {i} is empty")));
            }
            if !p.within_range(n) {
                return Err(Error::domain(format!(
                    "partition part {i} has a vertex outside 0..{n}"
                )));
            }
            if !seen.is_disjoint(p) {
                return Err(Error::domain(format!(
                    "partition part {i} overlaps an earlier part"
                )));
            }
            total += p.len();
            seen = seen.union(p);
        }
        if total != n {
            return Err(Error::domain(format!(
                "partition covers {total} of {n} vertices"
            )));
        }
        Ok(Partition { n, parts })
    }

    /// The one-part partition of `0..n`.
    pub fn trivial(n: usize) -> Self {
        Partition {
            n,
            parts: vec![VertexSet::full(n)],
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            n,
            parts: (0..n).map(VertexSet::singleton).collect(),
        }
    }

    /// Builds a partition from part indices per vertex (restricted-growth
    /// style labels need not be canonical; parts are ordered by first
    /// occurrence).
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut order: Vec<usize> = Vec::new();
        let mut parts: Vec<VertexSet> = Vec::new();
        for (v, &l) in labels.iter().enumerate() {
            match order.iter().position(|&x| x == l) {
                Some(i) => parts[i].insert(v),
                None => {
                    order.push(l);
                    parts.push(VertexSet::singleton(v));
                }
            }
        }
        Partition {
            n: labels.len(),
            parts,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[VertexSet] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Index of the part containing `v`.
    pub fn part_of(&self, v: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_basics() {
        let mut s = VertexSet::from_iter([1, 5, 64, 130]);
        assert_eq!(s.len(), 4);
        assert!(s.contains(64));
        assert!(!s.contains(2));
        assert_eq!(s.to_vec(), vec![1, 5, 64, 130]);
        assert_eq!(s.max_elem(), Some(130));
        s.remove(130);
        assert_eq!(s.max_elem(), Some(64));
        // trailing-zero trim keeps representations canonical
        let t = VertexSet::from_iter([1, 5, 64]);
        assert_eq!(s, t);
    }

    #[test]
    fn set_algebra() {
        let a = VertexSet::from_iter([0, 1, 2, 70]);
        let b = VertexSet::from_iter([2, 3, 70]);
        assert_eq!(a.intersection(&b).to_vec(), vec![2, 70]);
        assert_eq!(a.union(&b).len(), 5);
        assert_eq!(a.difference(&b).to_vec(), vec![0, 1]);
        assert_eq!(a.intersect_count(&b), 2);
        assert!(!a.is_disjoint(&b));
        assert!(VertexSet::from_iter([2, 70]).is_subset_of(&a));
        assert!(!a.is_subset_of(&b));
    }

    #[test]
    fn partition_invariants() {
        let p = Partition::new(
            4,
            vec![VertexSet::from_iter([0, 2]), VertexSet::from_iter([1, 3])],
        )
        .unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.part_of(3), Some(1));

        assert!(Partition::new(4, vec![VertexSet::full(3)]).is_err()); // missing 3
        assert!(Partition::new(2, vec![VertexSet::full(2), VertexSet::new()]).is_err());
        assert!(Partition::new(
            2,
            vec![VertexSet::from_iter([0, 1]), VertexSet::from_iter([1])]
        )
        .is_err());
    }

    #[test]
    fn labels_roundtrip() {
        let p = Partition::from_labels(&[0, 1, 0, 2, 1]);
        assert_eq!(p.len(), 3);
        assert_eq!(p.parts()[0].to_vec(), vec![0, 2]);
        assert_eq!(p.parts()[1].to_vec(), vec![1, 4]);
        assert_eq!(p.parts()[2].to_vec(), vec![3]);
    }
}
