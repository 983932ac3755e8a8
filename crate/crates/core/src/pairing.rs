//! The configuration model: uniform pairings of `d n` points, their projected
//! multigraphs, short-cycle censuses, and the related samplers.
//!
//! Point `p` belongs to vertex `p / d`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::rng::{stream_rng, TrialRng};

/// Rejection guard used by the simple-graph samplers unless overridden.
pub const DEFAULT_MAX_REJECTIONS: u64 = 1_000_000;
/// Largest cycle length the census will search.
pub const CENSUS_MAX_LENGTH: usize = 12;

/// A perfect matching of the `d n` points, stored as a partner array.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pairing {
    n: usize,
    d: usize,
    partner: Vec<u32>,
}

impl Pairing {
    /// Validates a partner array: an involution on `0..d n` without fixed points.
    pub fn from_partner(n: usize, d: usize, partner: Vec<u32>) -> Result<Self> {
        if partner.len() != n * d {
            return Err(Error::invalid("partner array must have d*n entries"));
        }
        for (p, &q) in partner.iter().enumerate() {
            if q as usize >= partner.len() || q as usize == p || partner[q as usize] as usize != p {
                return Err(Error::invalid(format!("point {p} is not properly paired")));
            }
        }
        Ok(Pairing { n, d, partner })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn partner(&self, p: u32) -> u32 {
        self.partner[p as usize]
    }

    pub fn partners(&self) -> &[u32] {
        &self.partner
    }

    /// Each pair once, as `(p, q)` with `p < q`, in increasing `p`.
    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.partner.iter().enumerate().filter(|(p, &q)| (*p as u32) < q).map(|(p, &q)| (p as u32, q))
    }
}

fn check_even(n: usize, d: usize) -> Result<()> {
    if (n * d) % 2 == 1 {
        return Err(Error::invalid(format!("d*n must be even (n={n}, d={d})")));
    }
    Ok(())
}

/// Uniform pairing drawn with `rng`: shuffle the points, then pair them off
/// consecutively.
pub fn sample_pairing_with<R: Rng>(n: usize, d: usize, rng: &mut R) -> Result<Pairing> {
    check_even(n, d)?;
    let mut pts: Vec<u32> = (0..(n * d) as u32).collect();
    pts.shuffle(rng);
    let mut partner = vec![0u32; n * d];
    for pair in pts.chunks_exact(2) {
        partner[pair[0] as usize] = pair[1];
        partner[pair[1] as usize] = pair[0];
    }
    Ok(Pairing { n, d, partner })
}

pub fn sample_pairing(n: usize, d: usize, seed: u64) -> Result<Pairing> {
    sample_pairing_with(n, d, &mut stream_rng(seed, 0))
}

/// Contracts each vertex's points into the vertex; every pair becomes an edge.
pub fn project(p: &Pairing) -> Multigraph {
    let mut g = Multigraph::new(p.n);
    for (a, b) in p.pairs() {
        g.push_edge(a / p.d as u32, b / p.d as u32);
    }
    g
}

/// Calls `f` with the partner array of every pairing of `points` points, in
/// lexicographic order of the sequence of partners of the lowest unpaired point.
pub fn for_each_pairing<F: FnMut(&[u32])>(points: usize, mut f: F) {
    fn rec<F: FnMut(&[u32])>(partner: &mut [u32], free: &mut Vec<u32>, f: &mut F) {
        if free.is_empty() {
            f(partner);
            return;
        }
        let a = free.remove(0);
        for i in 0..free.len() {
            let b = free.remove(i);
            partner[a as usize] = b;
            partner[b as usize] = a;
            rec(partner, free, f);
            free.insert(i, b);
        }
        free.insert(0, a);
    }
    if points % 2 == 1 {
        return;
    }
    let mut partner = vec![u32::MAX; points];
    let mut free: Vec<u32> = (0..points as u32).collect();
    rec(&mut partner, &mut free, &mut f);
}

/// Rejection-samples pairings from stream `(seed, 0)` until the projection is
/// simple, giving up after `max_rejections` failures.
pub fn sample_simple_regular_with_limit(n: usize, d: usize, seed: u64, max_rejections: u64) -> Result<Multigraph> {
    check_even(n, d)?;
    let mut rng = stream_rng(seed, 0);
    for _ in 0..=max_rejections {
        let g = project(&sample_pairing_with(n, d, &mut rng)?);
        if g.is_simple() {
            return Ok(g);
        }
    }
    Err(Error::RejectionLimit { attempts: max_rejections + 1 })
}

pub fn sample_simple_regular(n: usize, d: usize, seed: u64) -> Result<Multigraph> {
    sample_simple_regular_with_limit(n, d, seed, DEFAULT_MAX_REJECTIONS)
}

/// Counts `X_1..X_L` of a multigraph.
///
/// `X_1` counts loops and `X_2` unordered pairs of parallel edges. For
/// `i >= 3`, `X_i` counts `i`-cycles through distinct vertices with parallel
/// edges distinguished, so a cycle's weight is the product of the
/// multiplicities of its vertex pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleCensus {
    counts: Vec<u64>,
}

impl CycleCensus {
    /// `X_i` for `1 <= i <= max_length()`.
    pub fn get(&self, i: usize) -> u64 {
        self.counts[i - 1]
    }

    pub fn max_length(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// CSV rows `i,X_i` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,X_i\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, c));
        }
        out
    }
}

pub fn cycle_census(g: &Multigraph, max_length: usize) -> Result<CycleCensus> {
    if max_length == 0 || max_length > CENSUS_MAX_LENGTH {
        return Err(Error::invalid(format!("cycle census needs 1 <= L_max <= {CENSUS_MAX_LENGTH}")));
    }
    let mut counts = vec![0u64; max_length];
    let mult = g.multiplicities();
    let mut adj: Vec<Vec<(u32, u64)>> = vec![Vec::new(); g.n()];
    for (&(u, v), &c) in &mult {
        if u == v {
            counts[0] += c;
        } else {
            if max_length >= 2 {
                counts[1] += c * (c - 1) / 2;
            }
            adj[u as usize].push((v, c));
            adj[v as usize].push((u, c));
        }
    }
    if max_length >= 3 {
        let mut on_path = vec![false; g.n()];
        for s in 0..g.n() as u32 {
            on_path[s as usize] = true;
            walk(&adj, s, s, 1, 1, max_length, &mut on_path, &mut counts);
            on_path[s as usize] = false;
        }
        for c in counts.iter_mut().skip(2) {
            *c /= 2;
        }
    }
    Ok(CycleCensus { counts })
}

/// Extends a path from `s` (all interior vertices above `s`) and records each
/// closing edge back to `s`; every cycle is seen once per direction.
#[allow(clippy::too_many_arguments)]
fn walk(
    adj: &[Vec<(u32, u64)>],
    s: u32,
    v: u32,
    len: usize,
    weight: u64,
    max_length: usize,
    on_path: &mut [bool],
    counts: &mut [u64],
) {
    for &(x, c) in &adj[v as usize] {
        if x == s {
            if len >= 3 {
                counts[len - 1] += weight * c;
            }
        } else if x > s && !on_path[x as usize] && len < max_length {
            on_path[x as usize] = true;
            walk(adj, s, x, len + 1, weight * c, max_length, on_path, counts);
            on_path[x as usize] = false;
        }
    }
}

fn check_factor_shape(n: usize, k: usize) -> Result<()> {
    if k < 3 || n % k != 0 || n % 2 == 1 {
        return Err(Error::invalid(format!("need k >= 3, k | n and n even (n={n}, k={k})")));
    }
    Ok(())
}

/// One draw of a uniform `k`-cycle factor plus a uniform perfect matching,
/// with no conditioning.
///
/// The factor cuts a uniform vertex permutation into consecutive blocks of `k`.
/// Each factor arises from exactly `(n/k)! (2k)^(n/k)` permutations, so the
/// factor is uniform.
pub fn superposition_once<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<Multigraph> {
    check_factor_shape(n, k)?;
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(rng);
    let mut g = Multigraph::new(n);
    for block in perm.chunks_exact(k) {
        for i in 0..k {
            g.push_edge(block[i], block[(i + 1) % k]);
        }
    }
    perm.shuffle(rng);
    for pair in perm.chunks_exact(2) {
        g.push_edge(pair[0], pair[1]);
    }
    Ok(g)
}

/// Uniform `k`-cycle factor union uniform perfect matching, conditioned on
/// simplicity by rejection.
pub fn sample_superposition_with_limit(n: usize, k: usize, seed: u64, max_rejections: u64) -> Result<Multigraph> {
    check_factor_shape(n, k)?;
    let mut rng = stream_rng(seed, 0);
    for _ in 0..=max_rejections {
        let g = superposition_once(n, k, &mut rng)?;
        if g.is_simple() {
            return Ok(g);
        }
    }
    Err(Error::RejectionLimit { attempts: max_rejections + 1 })
}

pub fn sample_superposition(n: usize, k: usize, seed: u64) -> Result<Multigraph> {
    sample_superposition_with_limit(n, k, seed, DEFAULT_MAX_REJECTIONS)
}

/// Distribution of `X_3` under two models and two conditionings.
#[derive(Debug, Clone, Serialize)]
pub struct SuperpositionDiagnostic {
    pub n: usize,
    pub k: usize,
    pub samples: u64,
    /// `X_3` histograms, index = count.
    pub config_simple: Vec<u64>,
    pub superposition_simple: Vec<u64>,
    pub config_loopless: Vec<u64>,
    pub superposition_loopless: Vec<u64>,
    /// Total variation distance between the two simple-conditioned histograms.
    pub tv_simple: f64,
    /// Total variation distance between the two loop-free-conditioned histograms.
    pub tv_loopless: f64,
}

fn histogram(values: &[u64]) -> Vec<u64> {
    let top = values.iter().copied().max().unwrap_or(0) as usize;
    let mut h = vec![0u64; top + 1];
    for &v in values {
        h[v as usize] += 1;
    }
    h
}

fn total_variation(a: &[u64], b: &[u64]) -> f64 {
    let (sa, sb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let len = a.len().max(b.len());
    let at = |h: &[u64], i: usize| h.get(i).copied().unwrap_or(0) as f64;
    0.5 * (0..len).map(|i| (at(a, i) / sa - at(b, i) / sb).abs()).sum::<f64>()
}

/// Compares the `X_3` law of the configuration model with that of the
/// factor-plus-matching superposition. Both are reported conditioned on full
/// simplicity and on having no loops. The superposition never has loops, so
/// its loop-free sample is unconditioned. The comparison is descriptive only.
pub fn superposition_diagnostic(n: usize, k: usize, samples: u64, seed: u64) -> Result<SuperpositionDiagnostic> {
    check_factor_shape(n, k)?;
    let draw = |model: u64, want_simple: bool| -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(samples as usize);
        for i in 0..samples {
            let mut rng: TrialRng = stream_rng(seed ^ (model << 60), i);
            let mut tries = 0u64;
            loop {
                let g = if model % 2 == 0 {
                    project(&sample_pairing_with(n, 3, &mut rng)?)
                } else {
                    superposition_once(n, k, &mut rng)?
                };
                let ok = if want_simple { g.is_simple() } else { g.loop_count() == 0 };
                if ok {
                    out.push(cycle_census(&g, 3)?.get(3));
                    break;
                }
                tries += 1;
                if tries > DEFAULT_MAX_REJECTIONS {
                    return Err(Error::RejectionLimit { attempts: tries });
                }
            }
        }
        Ok(out)
    };
    let config_simple = histogram(&draw(0, true)?);
    let superposition_simple = histogram(&draw(1, true)?);
    let config_loopless = histogram(&draw(2, false)?);
    let superposition_loopless = histogram(&draw(3, false)?);
    Ok(SuperpositionDiagnostic {
        n,
        k,
        samples,
        tv_simple: total_variation(&config_simple, &superposition_simple),
        tv_loopless: total_variation(&config_loopless, &superposition_loopless),
        config_simple,
        superposition_simple,
        config_loopless,
        superposition_loopless,
    })
}

/// Erdős–Rényi `G(n, p)` by geometric skipping over the vertex pairs.
pub fn sample_gnp_with<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Multigraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("edge probability {p} outside [0,1]")));
    }
    let mut g = Multigraph::new(n);
    if p == 0.0 || n < 2 {
        return Ok(g);
    }
    if p == 1.0 {
        return Ok(Multigraph::complete(n));
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w): (i64, i64) = (1, -1);
    let n = n as i64;
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v && v < n {
            w -= v;
            v += 1;
        }
        if v < n {
            g.push_edge(w as u32, v as u32);
        }
    }
    Ok(g)
}

pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Multigraph> {
    sample_gnp_with(n, p, &mut stream_rng(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::matchings;
    use std::collections::HashMap;

    #[test]
    fn rejects_odd_point_count() {
        assert!(sample_pairing(3, 3, 1).is_err());
        assert!(sample_pairing(1000, 3, 1).is_ok());
    }

    #[test]
    fn pairing_invariants() {
        let p = sample_pairing(1000, 3, 9).unwrap();
        assert!(Pairing::from_partner(1000, 3, p.partners().to_vec()).is_ok());
        let g = project(&p);
        assert!(g.is_regular(3));
        assert_eq!(g.edge_count(), 1500);
        assert!(Pairing::from_partner(1, 2, vec![0, 0]).is_err());
    }

    #[test]
    fn hand_built_loop() {
        // Points 0 and 1 of vertex 0 are paired: a loop.
        let p = Pairing::from_partner(2, 3, vec![1, 0, 3, 2, 5, 4]).unwrap();
        let g = project(&p);
        assert_eq!(g.loop_count(), 2);
        assert_eq!(g.multiplicities().get(&(0, 1)), Some(&1));
        assert!(g.is_regular(3));
    }

    #[test]
    fn enumeration_counts() {
        let mut c = 0u64;
        for_each_pairing(12, |_| c += 1);
        assert_eq!(c, 10395);
        assert_eq!(matchings(12), c.into());
        let mut c6 = 0;
        for_each_pairing(6, |_| c6 += 1);
        assert_eq!(c6, 15);
    }

    #[test]
    fn n2_pairings_are_uniform() {
        let trials = 150_000u64;
        let mut freq: HashMap<Vec<u32>, u64> = HashMap::new();
        let mut rng = stream_rng(5, 0);
        for _ in 0..trials {
            *freq.entry(sample_pairing_with(2, 3, &mut rng).unwrap().partners().to_vec()).or_insert(0) += 1;
        }
        assert_eq!(freq.len(), 15);
        let p = 1.0 / 15.0;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        for &c in freq.values() {
            assert!(((c as f64 / trials as f64) - p).abs() < 5.0 * se);
        }
    }

    #[test]
    fn simple_regular_examples() {
        for seed in 0..5 {
            let g = sample_simple_regular(4, 3, seed).unwrap();
            assert_eq!(g.multiplicities().len(), 6);
            assert!(g.is_simple());
        }
        assert!(matches!(sample_simple_regular_with_limit(2, 3, 0, 1000), Err(Error::RejectionLimit { .. })));
    }

    #[test]
    fn census_examples() {
        let k4 = cycle_census(&Multigraph::complete(4), 4).unwrap();
        assert_eq!(k4.counts(), &[0, 0, 4, 3]);
        let c6 = cycle_census(&Multigraph::cycle(6), 8).unwrap();
        assert_eq!(c6.counts(), &[0, 0, 0, 0, 0, 1, 0, 0]);
        let k5 = cycle_census(&Multigraph::complete(5), 5).unwrap();
        assert_eq!(k5.counts(), &[0, 0, 10, 15, 12]);
        assert!(cycle_census(&Multigraph::complete(4), 13).is_err());
        // Triple edge: three 2-cycles; a doubled triangle side doubles the triangle.
        let g = Multigraph::from_edges(3, &[(0, 1), (0, 1), (0, 1), (1, 2), (2, 0), (2, 2)]).unwrap();
        assert_eq!(cycle_census(&g, 3).unwrap().counts(), &[1, 3, 3]);
    }

    #[test]
    fn superposition_is_cubic_and_simple() {
        for seed in 0..10 {
            let g = sample_superposition(12, 4, seed).unwrap();
            assert!(g.is_regular(3));
            assert!(g.is_simple());
        }
        assert!(sample_superposition(12, 5, 0).is_err());
    }

    #[test]
    fn gnp_extremes_and_mean() {
        assert_eq!(sample_gnp(50, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(sample_gnp(50, 1.0, 1).unwrap().edge_count(), 1225);
        let (n, p) = (1000usize, 0.01);
        let counts: Vec<f64> = (0..100).map(|s| sample_gnp(n, p, s).unwrap().edge_count() as f64).collect();
        let est = crate::rng::Estimate::from_values(&counts);
        let mean_deg = 2.0 * est.mean / n as f64;
        let expect = (n - 1) as f64 * p;
        let se_deg = 2.0 * est.std_error / n as f64;
        assert!((mean_deg - expect).abs() < 5.0 * se_deg, "{mean_deg} vs {expect}");
        let g = sample_gnp(200, 0.1, 3).unwrap();
        assert!(g.is_simple());
    }
}
