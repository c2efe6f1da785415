//! Alignment edge sets.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A `(source index, target index)` pair, both 0-based.
pub type Edge = (usize, usize);

/// A set of alignment edges between a source sentence of `src_len` tokens and
/// a target sentence of `tgt_len` tokens.
///
/// Edges are kept in a `BTreeSet`, so iteration is always row-major
/// (by source index, then target index).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AlignmentSet {
    src_len: usize,
    tgt_len: usize,
    edges: BTreeSet<Edge>,
}

impl AlignmentSet {
    pub fn new(src_len: usize, tgt_len: usize) -> Self {
        Self {
            src_len,
            tgt_len,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges<I>(src_len: usize, tgt_len: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut set = Self::new(src_len, tgt_len);
        for (i, j) in edges {
            set.insert(i, j)?;
        }
        Ok(set)
    }

    /// Builds a set whose dimensions are the smallest that hold every edge.
    pub fn from_edges_inferred<I>(edges: I) -> Self
    where
        I: IntoIterator<Item = Edge>,
    {
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        let src_len = edges.iter().map(|&(i, _)| i + 1).max().unwrap_or(0);
        let tgt_len = edges.iter().map(|&(_, j)| j + 1).max().unwrap_or(0);
        Self {
            src_len,
            tgt_len,
            edges,
        }
    }

    pub fn src_len(&self) -> usize {
        self.src_len
    }

    pub fn tgt_len(&self) -> usize {
        self.tgt_len
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.src_len, self.tgt_len)
    }

    /// Inserts an edge; returns whether it was new.
    pub fn insert(&mut self, i: usize, j: usize) -> Result<bool> {
        if i >= self.src_len || j >= self.tgt_len {
            return Err(Error::EdgeOutOfRange {
                src: i,
                tgt: j,
                src_len: self.src_len,
                tgt_len: self.tgt_len,
            });
        }
        Ok(self.edges.insert((i, j)))
    }

    pub fn remove(&mut self, i: usize, j: usize) -> bool {
        self.edges.remove(&(i, j))
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Row-major iteration.
    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn is_subset(&self, other: &AlignmentSet) -> bool {
        self.edges.is_subset(&other.edges)
    }

    /// Swaps source and target roles.
    pub fn transpose(&self) -> Self {
        Self {
            src_len: self.tgt_len,
            tgt_len: self.src_len,
            edges: self.edges.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }

    pub fn union(&self, other: &AlignmentSet) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self {
            src_len: self.src_len,
            tgt_len: self.tgt_len,
            edges: self.edges.union(&other.edges).copied().collect(),
        })
    }

    pub fn intersection(&self, other: &AlignmentSet) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self {
            src_len: self.src_len,
            tgt_len: self.tgt_len,
            edges: self.edges.intersection(&other.edges).copied().collect(),
        })
    }

    /// Adds every edge of `other` into `self`.
    pub fn extend_from(&mut self, other: &AlignmentSet) -> Result<()> {
        self.check_dims(other)?;
        self.edges.extend(other.edges.iter().copied());
        Ok(())
    }

    /// Per-source-token edge counts.
    pub fn src_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.src_len];
        for &(i, _) in &self.edges {
            deg[i] += 1;
        }
        deg
    }

    /// Per-target-token edge counts.
    pub fn tgt_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.tgt_len];
        for &(_, j) in &self.edges {
            deg[j] += 1;
        }
        deg
    }

    /// Grows the dimensions to at least `(src_len, tgt_len)`.
    pub fn resized(mut self, src_len: usize, tgt_len: usize) -> Result<Self> {
        if let Some(&(i, j)) = self
            .edges
            .iter()
            .find(|&&(i, j)| i >= src_len || j >= tgt_len)
        {
            return Err(Error::EdgeOutOfRange {
                src: i,
                tgt: j,
                src_len,
                tgt_len,
            });
        }
        self.src_len = src_len;
        self.tgt_len = tgt_len;
        Ok(self)
    }

    fn check_dims(&self, other: &AlignmentSet) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(format!(
                "alignment {}x{} vs {}x{}",
                self.src_len, self.tgt_len, other.src_len, other.tgt_len
            )));
        }
        Ok(())
    }
}

/// Pharaoh rendering: `i-j` items separated by single spaces, row-major.
impl fmt::Display for AlignmentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (i, j)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{i}-{j}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_rejects_out_of_range() {
        let mut a = AlignmentSet::new(2, 3);
        assert!(a.insert(1, 2).unwrap());
        assert!(!a.insert(1, 2).unwrap());
        assert!(matches!(a.insert(2, 0), Err(Error::EdgeOutOfRange { .. })));
        assert!(a.insert(0, 3).is_err());
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn display_is_row_major() {
        let a = AlignmentSet::from_edges(3, 3, [(2, 0), (0, 2), (0, 1), (1, 1)]).unwrap();
        assert_eq!(a.to_string(), "0-1 0-2 1-1 2-0");
        assert_eq!(AlignmentSet::new(1, 1).to_string(), "");
    }

    #[test]
    fn transpose_swaps_dims() {
        let a = AlignmentSet::from_edges(2, 3, [(0, 2), (1, 0)]).unwrap();
        let t = a.transpose();
        assert_eq!(t.dims(), (3, 2));
        assert!(t.contains(2, 0) && t.contains(0, 1));
        assert_eq!(t.transpose(), a);
    }

    #[test]
    fn set_ops_check_dims() {
        let a = AlignmentSet::from_edges(2, 2, [(0, 0), (1, 1)]).unwrap();
        let b = AlignmentSet::from_edges(2, 2, [(0, 0), (1, 0)]).unwrap();
        assert_eq!(a.intersection(&b).unwrap().len(), 1);
        assert_eq!(a.union(&b).unwrap().len(), 3);
        assert!(a.union(&AlignmentSet::new(3, 2)).is_err());
    }

    #[test]
    fn inferred_dims() {
        let a = AlignmentSet::from_edges_inferred([(0, 4), (2, 1)]);
        assert_eq!(a.dims(), (3, 5));
        assert_eq!(AlignmentSet::from_edges_inferred([]).dims(), (0, 0));
        assert!(a.clone().resized(2, 5).is_err());
        assert_eq!(a.resized(4, 6).unwrap().dims(), (4, 6));
    }
}
