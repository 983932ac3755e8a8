//! Intersection patterns: the common subgraph of two `k`-cycle factors,
//! made of `h` whole `k`-cycles and `m` vertex-disjoint paths with at least
//! two vertices each, together covering all `n` vertices.
//!
//! This module counts and samples patterns, computes the number `N(S)` of
//! rooted, ordered, directed factors containing a pattern, and assembles the
//! exact second moment of `Y_k` at small `n`.

mod moments;
mod normality;
pub mod oracle;
mod paths;
mod psi;

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::combinatorics::{binomial_ext, factorial, falling, pow_u};
use crate::error::{Error, Result};
use crate::lengths::LengthMultiset;
use crate::rng::stream_rng;

pub use moments::{direct_second_moment, second_moment_exact, DirectMoments, PatternClassSum, SecondMomentReport};
pub use normality::{is_delta_normal, NormalityParams, NormalityReport, Violation};
pub use paths::{
    composition_part_probability, path_stats_experiment, sample_composition, PathStatsConfig, PathStatsReport,
};
pub use psi::{psi0_ratio, psi_ledger, PsiLedger, PsiRow, PsiValue, PSI_EXACT_MAX_N};

/// `h` cycles of a common length and `m` paths, vertex-disjoint and covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct IntersectionPattern {
    n: usize,
    cycles: Vec<Vec<u32>>,
    paths: Vec<Vec<u32>>,
}

impl IntersectionPattern {
    pub fn new(n: usize, cycles: Vec<Vec<u32>>, paths: Vec<Vec<u32>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for comp in cycles.iter().chain(paths.iter()) {
            for &v in comp {
                if v as usize >= n || seen[v as usize] {
                    return Err(Error::invalid(format!("vertex {v} repeated or out of range")));
                }
                seen[v as usize] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("components must cover every vertex"));
        }
        if paths.iter().any(|p| p.len() < 2) {
            return Err(Error::invalid("paths need at least two vertices"));
        }
        if let Some(first) = cycles.first() {
            if first.len() < 3 || cycles.iter().any(|c| c.len() != first.len()) {
                return Err(Error::invalid("cycles must share one length of at least 3"));
            }
        }
        Ok(IntersectionPattern { n, cycles, paths })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> usize {
        self.cycles.len()
    }

    pub fn m(&self) -> usize {
        self.paths.len()
    }

    pub fn cycles(&self) -> &[Vec<u32>] {
        &self.cycles
    }

    pub fn paths(&self) -> &[Vec<u32>] {
        &self.paths
    }

    /// Common cycle length, when there is at least one cycle.
    pub fn cycle_length(&self) -> Option<usize> {
        self.cycles.first().map(Vec::len)
    }

    /// Path vertex counts in nondecreasing order.
    pub fn path_lengths(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.paths.iter().map(|p| p.len() as u64).collect();
        v.sort_unstable();
        v
    }

    pub fn length_multiset(&self) -> Option<LengthMultiset> {
        LengthMultiset::from_lengths(&self.path_lengths()).ok()
    }

    /// Undirected edges as `(min, max)` pairs.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        let mut push = |a: u32, b: u32| out.push((a.min(b), a.max(b)));
        for c in &self.cycles {
            for i in 0..c.len() {
                push(c[i], c[(i + 1) % c.len()]);
            }
        }
        for p in &self.paths {
            for w in p.windows(2) {
                push(w[0], w[1]);
            }
        }
        out
    }
}

fn check_shape(n: usize, k: usize) -> Result<()> {
    if k < 3 || n % k != 0 {
        return Err(Error::invalid(format!("need k >= 3 and k | n (n={n}, k={k})")));
    }
    Ok(())
}

/// `|I_{h,m}| = n! / (h! (2k)^h m! 2^m) * C(n - kh - m - 1, m - 1)`, with
/// `C(-1,-1) = 1` covering the all-cycles pattern.
pub fn count_patterns(n: usize, m: usize, h: usize, k: usize) -> Result<BigUint> {
    if h > 0 && k < 3 {
        return Err(Error::invalid("cycles need k >= 3"));
    }
    let used = k * h + 2 * m;
    let feasible = used <= n && (m >= 1 || k * h == n);
    if !feasible {
        return Err(Error::invalid(format!("no patterns with n={n}, m={m}, h={h}, k={k}")));
    }
    let c = binomial_ext(n as i64 - (k * h) as i64 - m as i64 - 1, m as i64 - 1);
    let num = factorial(n as u64) * c;
    let den = factorial(h as u64) * pow_u(2 * k as u64, h as u64) * factorial(m as u64) * pow_u(2, m as u64);
    Ok(num / den)
}

/// Uniform pattern in `I_{0,m}`: a uniform composition of `n` into `m` parts
/// of size at least 2, laid over a uniform vertex permutation.
pub fn sample_pattern_with<R: Rng>(n: usize, m: usize, rng: &mut R) -> Result<IntersectionPattern> {
    let parts = sample_composition(n, m, rng)?;
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(rng);
    let mut paths = Vec::with_capacity(m);
    let mut at = 0;
    for p in parts {
        paths.push(perm[at..at + p].to_vec());
        at += p;
    }
    IntersectionPattern::new(n, Vec::new(), paths)
}

pub fn sample_pattern(n: usize, m: usize, seed: u64) -> Result<IntersectionPattern> {
    sample_pattern_with(n, m, &mut stream_rng(seed, 0))
}

/// Calls `f` once for every pattern on `n` vertices: all path forests, plus
/// patterns with `cycle_length`-cycles when it is given.
pub fn enumerate_patterns<F: FnMut(&IntersectionPattern)>(n: usize, cycle_length: Option<usize>, mut f: F) {
    let mut cycles = Vec::new();
    let mut paths = Vec::new();
    let mut free: Vec<u32> = (0..n as u32).collect();
    enumerate_rec(n, cycle_length, &mut free, &mut cycles, &mut paths, &mut f);
}

fn enumerate_rec<F: FnMut(&IntersectionPattern)>(
    n: usize,
    k: Option<usize>,
    free: &mut Vec<u32>,
    cycles: &mut Vec<Vec<u32>>,
    paths: &mut Vec<Vec<u32>>,
    f: &mut F,
) {
    if free.is_empty() {
        f(&IntersectionPattern { n, cycles: cycles.clone(), paths: paths.clone() });
        return;
    }
    let anchor = free[0];
    let rest: Vec<u32> = free[1..].to_vec();
    // Choose the other members of the anchor's component.
    for size in 2..=free.len() {
        let mut chosen = Vec::with_capacity(size - 1);
        subsets(&rest, size - 1, 0, &mut chosen, &mut |others| {
            let mut block = vec![anchor];
            block.extend_from_slice(others);
            let remaining: Vec<u32> = rest.iter().copied().filter(|v| !others.contains(v)).collect();
            let saved = std::mem::replace(free, remaining);
            for_each_arrangement(&block, false, &mut |seq| {
                paths.push(seq.to_vec());
                enumerate_rec(n, k, free, cycles, paths, f);
                paths.pop();
            });
            if k == Some(size) {
                for_each_arrangement(&block, true, &mut |seq| {
                    cycles.push(seq.to_vec());
                    enumerate_rec(n, k, free, cycles, paths, f);
                    cycles.pop();
                });
            }
            *free = saved;
        });
    }
}

fn subsets<F: FnMut(&[u32])>(items: &[u32], want: usize, start: usize, chosen: &mut Vec<u32>, f: &mut F) {
    if chosen.len() == want {
        f(chosen);
        return;
    }
    for i in start..items.len() {
        if items.len() - i < want - chosen.len() {
            break;
        }
        chosen.push(items[i]);
        subsets(items, want, i + 1, chosen, f);
        chosen.pop();
    }
}

/// Every undirected path (`cyclic = false`) or cycle (`cyclic = true`) on the
/// vertex set `block`, each exactly once, in a canonical orientation.
fn for_each_arrangement<F: FnMut(&[u32])>(block: &[u32], cyclic: bool, f: &mut F) {
    let mut seq = block.to_vec();
    seq.sort_unstable();
    if cyclic {
        // Fix the smallest vertex first; require second < last.
        let first = seq[0];
        let mut tail = seq[1..].to_vec();
        permute(&mut tail, 0, &mut |t| {
            if t[0] < t[t.len() - 1] {
                let mut s = vec![first];
                s.extend_from_slice(t);
                f(&s);
            }
        });
    } else {
        permute(&mut seq, 0, &mut |s| {
            if s[0] < s[s.len() - 1] {
                f(s);
            }
        });
    }
}

fn permute<F: FnMut(&[u32])>(v: &mut [u32], i: usize, f: &mut F) {
    if i == v.len() {
        f(v);
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permute(v, i + 1, f);
        v.swap(i, j);
    }
}

/// Largest DP state count accepted by [`count_n`].
pub const COUNT_N_MAX_STATES: u64 = 4_000_000;

/// Number `N(S)` of rooted, ordered, directed `k`-cycle factors on `0..n`
/// whose edge set contains the pattern.
///
/// The `h` cycles of `S` occupy `h` of the `n/k` ordered slots, each rooted
/// and directed freely. For the path part, `N = 2^m * sum over orderings of
/// the paths whose prefix sums hit every multiple of k of the product, over
/// cycles, of the length of the cycle's first path`. The root of each cycle
/// lies in its first path, and the `2^m` accounts for path orientations.
pub fn count_n(s: &IntersectionPattern, k: usize) -> Result<BigUint> {
    check_shape(s.n(), k)?;
    if let Some(len) = s.cycle_length() {
        if len != k {
            return Ok(BigUint::zero());
        }
    }
    count_n_for_lengths(s.n(), k, s.h(), &s.path_lengths())
}

/// [`count_n`] from the pattern's shape alone.
pub fn count_n_for_lengths(n: usize, k: usize, h: usize, path_lengths: &[u64]) -> Result<BigUint> {
    check_shape(n, k)?;
    let slots = n / k;
    if h > slots {
        return Ok(BigUint::zero());
    }
    let cycle_part = falling(slots as u64, h as u64) * pow_u(2 * k as u64, h as u64);
    if path_lengths.is_empty() {
        return Ok(cycle_part);
    }
    let mut distinct: Vec<(u64, u32)> = Vec::new();
    for &l in path_lengths {
        match distinct.last_mut() {
            Some((dl, c)) if *dl == l => *c += 1,
            _ => distinct.push((l, 1)),
        }
    }
    if distinct.iter().any(|&(l, _)| l as usize > k) {
        return Ok(BigUint::zero());
    }
    let states = distinct.iter().fold(k as u64, |acc, &(_, c)| acc.saturating_mul(c as u64 + 1));
    if states > COUNT_N_MAX_STATES {
        return Err(Error::Budget(format!("N(S) dynamic program would need {states} states")));
    }
    let lens: Vec<u64> = distinct.iter().map(|d| d.0).collect();
    let mut memo: HashMap<(Vec<u32>, u32), BigUint> = HashMap::new();
    let counts: Vec<u32> = distinct.iter().map(|d| d.1).collect();
    let orderings = tile(&lens, k as u32, counts, 0, &mut memo);
    Ok(cycle_part * orderings * pow_u(2, path_lengths.len() as u64))
}

/// Weighted orderings of the remaining paths, `r` vertices into the current cycle.
fn tile(
    lens: &[u64],
    k: u32,
    counts: Vec<u32>,
    r: u32,
    memo: &mut HashMap<(Vec<u32>, u32), BigUint>,
) -> BigUint {
    if counts.iter().all(|&c| c == 0) {
        return if r == 0 { BigUint::one() } else { BigUint::zero() };
    }
    let key = (counts, r);
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let (counts, r) = key;
    let mut total = BigUint::zero();
    for (i, &l) in lens.iter().enumerate() {
        let c = counts[i];
        if c == 0 || r + l as u32 > k {
            continue;
        }
        let mut next = counts.clone();
        next[i] -= 1;
        let r2 = if r + l as u32 == k { 0 } else { r + l as u32 };
        let sub = tile(lens, k, next, r2, memo);
        if sub.is_zero() {
            continue;
        }
        let weight = if r == 0 { c as u64 * l } else { c as u64 };
        total += sub * weight;
    }
    memo.insert((counts, r), total.clone());
    total
}
