//! Multisets of positive integer lengths.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-empty multiset of positive integers, stored as `length -> multiplicity`.
///
/// `m` is the number of elements and `n` their sum, so `n >= m >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<u64, u64>", into = "BTreeMap<u64, u64>")]
pub struct LengthMultiset {
    counts: BTreeMap<u64, u64>,
    m: u64,
    n: u64,
}

impl LengthMultiset {
    /// Builds a multiset from `(length, multiplicity)` pairs. Repeated lengths
    /// are merged; zero multiplicities are dropped.
    pub fn from_counts<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for (len, mult) in pairs {
            if len == 0 {
                return Err(Error::invalid("lengths must be positive"));
            }
            if mult > 0 {
                *counts.entry(len).or_insert(0u64) += mult;
            }
        }
        Self::from_map(counts)
    }

    pub fn from_lengths(lengths: &[u64]) -> Result<Self> {
        Self::from_counts(lengths.iter().map(|&l| (l, 1)))
    }

    fn from_map(counts: BTreeMap<u64, u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid("a length multiset needs at least one element"));
        }
        let mut m = 0u64;
        let mut n = 0u64;
        for (&len, &mult) in &counts {
            m = m.checked_add(mult).ok_or_else(|| Error::invalid("multiplicity overflow"))?;
            let add = len.checked_mul(mult).ok_or_else(|| Error::invalid("total length overflow"))?;
            n = n.checked_add(add).ok_or_else(|| Error::invalid("total length overflow"))?;
        }
        Ok(LengthMultiset { counts, m, n })
    }

    /// Truncated geometric family: `2^(top-l)` copies of each `l` in
    /// `2..=top`, plus one extra copy of `top`, so that `m = 2^(top-1)` and
    /// every frequency below `top` is exactly `2^(1-l)`.
    pub fn truncated_geometric(top: u64) -> Result<Self> {
        if !(2..=62).contains(&top) {
            return Err(Error::invalid("truncated_geometric needs 2 <= top <= 62"));
        }
        let mut pairs: Vec<(u64, u64)> = (2..=top).map(|l| (l, 1u64 << (top - l))).collect();
        pairs.push((top, 1));
        Self::from_counts(pairs)
    }

    /// Geometric-like family with `m` elements: `floor(m / 2^(l-1))` copies of
    /// each `l >= 2`, with the rounding deficit spread one copy per length
    /// over the lengths just past the last occupied one.
    pub fn geometric_like(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("geometric_like needs m >= 2"));
        }
        let mut pairs = Vec::new();
        let mut used = 0u64;
        let mut len = 2u64;
        loop {
            let c = m >> (len - 1);
            if c == 0 {
                break;
            }
            pairs.push((len, c));
            used += c;
            len += 1;
        }
        for extra in 0..(m - used) {
            pairs.push((len + extra, 1));
        }
        Self::from_counts(pairs)
    }

    /// Number of elements.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Sum of the elements.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn multiplicity(&self, len: u64) -> u64 {
        self.counts.get(&len).copied().unwrap_or(0)
    }

    pub fn max_length(&self) -> u64 {
        *self.counts.keys().next_back().expect("non-empty")
    }

    /// Exact frequency `p_l = m_l / m`.
    pub fn frequency(&self, len: u64) -> BigRational {
        BigRational::new(BigInt::from(self.multiplicity(len)), BigInt::from(self.m))
    }

    /// Elements in nondecreasing order.
    pub fn to_sorted_vec(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.m as usize);
        for (&len, &mult) in &self.counts {
            out.extend(std::iter::repeat(len).take(mult as usize));
        }
        out
    }

    /// The multiset with one copy of `len` removed, or `None` when that
    /// leaves nothing.
    pub fn without_one(&self, len: u64) -> Option<LengthMultiset> {
        let mut counts = self.counts.clone();
        let c = counts.get_mut(&len)?;
        *c -= 1;
        if *c == 0 {
            counts.remove(&len);
        }
        Self::from_map(counts).ok()
    }

    /// Greatest common divisor of the distinct lengths.
    pub fn gcd(&self) -> u64 {
        self.counts.keys().fold(0, |g, &l| num_integer::gcd(g, l))
    }
}

impl fmt::Display for LengthMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|(l, c)| format!("{l}:{c}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses `"len:mult,len:mult,..."`; a bare `len` means multiplicity one.
impl FromStr for LengthMultiset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (l, c) = item.split_once(':').unwrap_or((item, "1"));
            let l: u64 = l.trim().parse().map_err(|_| Error::Parse(format!("bad length `{l}`")))?;
            let c: u64 = c.trim().parse().map_err(|_| Error::Parse(format!("bad multiplicity `{c}`")))?;
            pairs.push((l, c));
        }
        Self::from_counts(pairs)
    }
}

impl TryFrom<BTreeMap<u64, u64>> for LengthMultiset {
    type Error = Error;

    fn try_from(map: BTreeMap<u64, u64>) -> Result<Self> {
        Self::from_counts(map)
    }
}

impl From<LengthMultiset> for BTreeMap<u64, u64> {
    fn from(l: LengthMultiset) -> Self {
        l.counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_totals() {
        let l: LengthMultiset = "2:5,3:4".parse().unwrap();
        assert_eq!(l.m(), 9);
        assert_eq!(l.n(), 22);
        assert_eq!(l.to_string(), "2:5,3:4");
        assert!("0:1".parse::<LengthMultiset>().is_err());
        assert!("".parse::<LengthMultiset>().is_err());
        assert!("2:x".parse::<LengthMultiset>().is_err());
    }

    #[test]
    fn truncated_geometric_shape() {
        let l = LengthMultiset::truncated_geometric(30).unwrap();
        assert_eq!(l.m(), 1 << 29);
        assert_eq!(l.multiplicity(2), 1 << 28);
        assert_eq!(l.multiplicity(30), 2);
    }

    #[test]
    fn geometric_like_has_requested_size() {
        for m in [60, 120, 240, 480, 1000] {
            let l = LengthMultiset::geometric_like(m).unwrap();
            assert_eq!(l.m(), m);
            assert_eq!(l.multiplicity(1), 0);
        }
    }

    #[test]
    fn without_one_shrinks() {
        let l = LengthMultiset::from_lengths(&[1, 2, 2]).unwrap();
        let r = l.without_one(2).unwrap();
        assert_eq!(r.to_sorted_vec(), vec![1, 2]);
        assert!(LengthMultiset::from_lengths(&[4]).unwrap().without_one(4).is_none());
        assert!(l.without_one(3).is_none());
    }
}
