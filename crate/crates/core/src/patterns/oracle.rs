//! Brute-force ground truth for `N(S)`: enumerate every vertex sequence of
//! `0..n`, read it as a rooted, ordered, directed `k`-cycle factor, and count
//! those whose edge set contains the pattern.

use std::collections::HashMap;

use super::IntersectionPattern;
use crate::error::{Error, Result};

/// Largest `n` for which every vertex pair fits in a 64-bit edge mask.
pub const ORACLE_MAX_N: usize = 11;

fn pair_bit(n: usize, u: u32, v: u32) -> u64 {
    let (a, b) = (u.min(v) as usize, u.max(v) as usize);
    1u64 << (a * (2 * n - a - 1) / 2 + (b - a - 1))
}

/// Edge mask of a list of undirected edges on `0..n`.
pub fn edge_mask(n: usize, edges: &[(u32, u32)]) -> u64 {
    edges.iter().fold(0, |m, &(u, v)| m | pair_bit(n, u, v))
}

/// Every rooted, ordered, directed `k`-cycle factor of `K_n`, grouped by edge set.
pub struct RodTable {
    n: usize,
    /// Distinct factor edge masks with the number of vertex sequences giving each.
    masks: Vec<(u64, u64)>,
}

impl RodTable {
    /// Enumerates all `n!` vertex sequences.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n > ORACLE_MAX_N || k < 3 || n % k != 0 {
            return Err(Error::invalid(format!("oracle needs n <= {ORACLE_MAX_N}, k >= 3, k | n")));
        }
        let mut counts: HashMap<u64, u64> = HashMap::new();
        let mut seq: Vec<u32> = (0..n as u32).collect();
        // Heap's algorithm visits each permutation once.
        let mut c = vec![0usize; n];
        let mut record = |s: &[u32]| {
            let mut mask = 0u64;
            for block in s.chunks_exact(k) {
                for i in 0..k {
                    mask |= pair_bit(n, block[i], block[(i + 1) % k]);
                }
            }
            *counts.entry(mask).or_insert(0) += 1;
        };
        record(&seq);
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    seq.swap(0, i);
                } else {
                    seq.swap(c[i], i);
                }
                record(&seq);
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        let mut masks: Vec<(u64, u64)> = counts.into_iter().collect();
        masks.sort_unstable();
        Ok(RodTable { n, masks })
    }

    /// Number of distinct (unrooted, unordered, undirected) cycle factors.
    pub fn distinct_factors(&self) -> usize {
        self.masks.len()
    }

    /// Total number of rooted, ordered, directed factors, `n!`.
    pub fn total(&self) -> u64 {
        self.masks.iter().map(|m| m.1).sum()
    }

    /// Number of rooted, ordered, directed factors containing every edge in `mask`.
    pub fn count_containing(&self, mask: u64) -> u64 {
        self.masks.iter().filter(|(f, _)| f & mask == mask).map(|m| m.1).sum()
    }

    pub fn count_containing_pattern(&self, s: &IntersectionPattern) -> u64 {
        self.count_containing(edge_mask(self.n, &s.edges()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes() {
        let t = RodTable::new(6, 3).unwrap();
        assert_eq!(t.total(), 720);
        // Pairs of disjoint triangles on 6 labelled vertices.
        assert_eq!(t.distinct_factors(), 10);
        assert_eq!(RodTable::new(4, 4).unwrap().distinct_factors(), 3);
        assert!(RodTable::new(12, 4).is_err());
    }
}
