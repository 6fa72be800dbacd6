//! Running maximum of the signature components under decreasing updates.
//!
//! The `m` leaves are followed by `m - 1` internal nodes in one array. With
//! 0-based indices the parent of node `i` is `m + i / 2` and the children of
//! internal node `p` are `2 (p - m)` and `2 (p - m) + 1`; the root is the last
//! entry. The layout is a valid binary tree for every `m >= 1`.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct MaxTracker {
    nodes: Vec<f64>,
    m: usize,
}

impl MaxTracker {
    /// Tracker over `m` leaves, all initialized to `+inf`.
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidSize(m));
        }
        Ok(MaxTracker { nodes: vec![f64::INFINITY; 2 * m - 1], m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn current_max(&self) -> f64 {
        self.nodes[2 * self.m - 2]
    }

    pub fn leaf(&self, index: usize) -> f64 {
        self.nodes[index]
    }

    pub fn leaves(&self) -> &[f64] {
        &self.nodes[..self.m]
    }

    /// All `2m - 1` nodes, leaves first.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn into_leaves(mut self) -> Vec<f64> {
        self.nodes.truncate(self.m);
        self.nodes
    }

    /// Lowers leaf `index` (0-based) to `x` if `x` is strictly smaller and
    /// propagates the change towards the root. Returns the number of node
    /// writes.
    pub fn update(&mut self, index: usize, x: f64) -> Result<usize> {
        if index >= self.m {
            return Err(Error::InvalidIndex { index, m: self.m });
        }
        Ok(self.lower(index, x))
    }

    #[inline]
    pub(crate) fn lower(&mut self, index: usize, x: f64) -> usize {
        debug_assert!(index < self.m);
        let m = self.m;
        let end = 2 * m - 1;
        let mut i = index;
        let mut value = x;
        let mut writes = 0;
        while value < self.nodes[i] {
            self.nodes[i] = value;
            writes += 1;
            i = m + i / 2;
            if i >= end {
                break;
            }
            let left = 2 * (i - m);
            value = self.nodes[left].max(self.nodes[left + 1]);
        }
        writes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn audit(t: &MaxTracker) {
        let m = t.m();
        for p in m..2 * m - 1 {
            let left = 2 * (p - m);
            assert_eq!(t.nodes()[p], t.nodes()[left].max(t.nodes()[left + 1]), "node {p}");
        }
        let scan = t.leaves().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(t.current_max(), scan);
    }

    #[test]
    fn construction() {
        let t = MaxTracker::new(4).unwrap();
        assert_eq!(t.nodes().len(), 7);
        assert!(t.nodes().iter().all(|v| *v == f64::INFINITY));
        assert_eq!(t.current_max(), f64::INFINITY);
        let single = MaxTracker::new(1).unwrap();
        assert_eq!(single.nodes().len(), 1);
        assert!(matches!(MaxTracker::new(0), Err(Error::InvalidSize(0))));
    }

    #[test]
    fn updates() {
        let mut t = MaxTracker::new(4).unwrap();
        t.update(0, 3.0).unwrap();
        assert_eq!(t.leaf(0), 3.0);
        assert_eq!(t.current_max(), f64::INFINITY);
        for (j, x) in [(1, 1.0), (2, 4.0), (3, 2.0)] {
            t.update(j, x).unwrap();
        }
        assert_eq!(t.current_max(), 4.0);
        audit(&t);
        let before = t.nodes().to_vec();
        assert_eq!(t.update(2, 4.0).unwrap(), 0);
        assert_eq!(t.update(2, 5.0).unwrap(), 0);
        assert_eq!(t.nodes(), before.as_slice());
        t.update(2, 0.5).unwrap();
        assert_eq!(t.current_max(), 3.0);
        audit(&t);
        assert!(matches!(t.update(4, 1.0), Err(Error::InvalidIndex { index: 4, m: 4 })));
    }

    #[test]
    fn single_leaf_is_root() {
        let mut t = MaxTracker::new(1).unwrap();
        t.update(0, 2.0).unwrap();
        assert_eq!(t.current_max(), 2.0);
    }

    #[test]
    fn non_power_of_two_sizes() {
        for m in [3usize, 5, 6, 7, 100] {
            let mut t = MaxTracker::new(m).unwrap();
            let mut x = 1000.0;
            for round in 0..5 * m {
                x *= 0.999;
                t.update((round * 7) % m, x).unwrap();
                audit(&t);
            }
        }
    }
}
