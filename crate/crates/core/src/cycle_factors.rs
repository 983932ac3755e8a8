//! Exact counting of `k`-cycle factors in cubic multigraphs, exact and
//! asymptotic first moments over the configuration model, and the threshold
//! function `K0(n)`.
//!
//! In a cubic multigraph the spanning 2-regular subgraphs are exactly the
//! complements of perfect matchings. The counter enumerates perfect matchings
//! and keeps those whose complement is a disjoint union of `k`-cycles.
//! Parallel edges are distinguished, so two factors that differ only in which
//! parallel copy they use are counted separately.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::combinatorics::{factorial, int, matchings, pow_u, ratio, to_f64};
use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::pairing::{project, sample_pairing_with};
use crate::power_series::ser_rat;
use crate::rng::{integer_trials, Estimate};

const NONE: u32 = u32::MAX;

/// `kappa_0 = 1 / (1 - log2(3) / 2)`.
pub fn kappa0() -> f64 {
    1.0 / (1.0 - 0.5 * 3f64.log2())
}

/// `K0(n) = kappa_0 * log2(2n / e)`.
pub fn threshold_k0(n: f64) -> Result<f64> {
    if n < 2.0 {
        return Err(Error::invalid("K0(n) needs n >= 2"));
    }
    Ok(kappa0() * (2.0 * n / std::f64::consts::E).log2())
}

fn check_cubic(g: &Multigraph, k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::invalid("cycle length k must be at least 3"));
    }
    if !g.is_regular(3) {
        return Err(Error::invalid("the matching-based counter needs a 3-regular multigraph"));
    }
    Ok(())
}

/// Depth-first enumeration of perfect matchings with the complement built
/// incrementally as path fragments.
///
/// Fragment endpoints store the opposite endpoint and the fragment's vertex
/// count. A fragment that closes into a cycle of length other than `k`, or a
/// path with more than `k` vertices, cuts the branch.
struct Counter<'g> {
    g: &'g Multigraph,
    k: u32,
    mate: Vec<u32>,
    marks: Vec<u8>,
    other_end: Vec<u32>,
    size: Vec<u32>,
    trail: Vec<(u32, u32, u32)>,
    count: u64,
    limit: u64,
}

impl<'g> Counter<'g> {
    fn new(g: &'g Multigraph, k: usize, limit: u64) -> Self {
        let n = g.n();
        Counter {
            g,
            k: k as u32,
            mate: vec![NONE; n],
            marks: vec![0; g.edge_count()],
            other_end: (0..n as u32).collect(),
            size: vec![1; n],
            trail: Vec::new(),
            count: 0,
            limit,
        }
    }

    fn save(&mut self, v: u32) {
        self.trail.push((v, self.other_end[v as usize], self.size[v as usize]));
    }

    /// Adds complement edge `x`-`y`; false when the fragment becomes infeasible.
    fn link(&mut self, x: u32, y: u32) -> bool {
        if self.other_end[x as usize] == y {
            return self.size[x as usize] == self.k;
        }
        let a = self.other_end[x as usize];
        let b = self.other_end[y as usize];
        let total = self.size[x as usize] + self.size[y as usize];
        if total > self.k {
            return false;
        }
        for v in [x, y, a, b] {
            self.save(v);
        }
        self.other_end[a as usize] = b;
        self.other_end[b as usize] = a;
        self.size[a as usize] = total;
        self.size[b as usize] = total;
        true
    }

    /// Marks the non-matching edges at `v` as complement edges.
    fn close_vertex(&mut self, v: u32, matched: u32, touched: &mut Vec<u32>) -> bool {
        for &(w, e) in self.g.incidence(v) {
            if e == matched {
                continue;
            }
            touched.push(e);
            self.marks[e as usize] += 1;
            if self.marks[e as usize] == 1 && !self.link(v, w) {
                return false;
            }
        }
        true
    }

    fn has_free_partner(&self, y: u32) -> bool {
        self.g.incidence(y).iter().any(|&(z, _)| z != y && self.mate[z as usize] == NONE)
    }

    fn search(&mut self, from: usize) {
        let n = self.g.n();
        let mut v = from;
        while v < n && self.mate[v] != NONE {
            v += 1;
        }
        if v == n {
            self.count += 1;
            return;
        }
        let v = v as u32;
        let inc: Vec<(u32, u32)> = self.g.incidence(v).to_vec();
        for (w, e) in inc {
            if w == v || self.mate[w as usize] != NONE {
                continue;
            }
            let trail_mark = self.trail.len();
            let mut touched = Vec::with_capacity(4);
            self.mate[v as usize] = e;
            self.mate[w as usize] = e;
            let ok = self.close_vertex(v, e, &mut touched)
                && self.close_vertex(w, e, &mut touched)
                && [v, w].iter().all(|&u| {
                    self.g
                        .incidence(u)
                        .iter()
                        .all(|&(y, _)| self.mate[y as usize] != NONE || self.has_free_partner(y))
                });
            if ok {
                self.search(v as usize + 1);
            }
            for t in touched {
                self.marks[t as usize] -= 1;
            }
            while self.trail.len() > trail_mark {
                let (x, o, s) = self.trail.pop().expect("trail entry");
                self.other_end[x as usize] = o;
                self.size[x as usize] = s;
            }
            self.mate[v as usize] = NONE;
            self.mate[w as usize] = NONE;
            if self.count >= self.limit {
                return;
            }
        }
    }
}

fn count_up_to(g: &Multigraph, k: usize, limit: u64) -> Result<u64> {
    check_cubic(g, k)?;
    let n = g.n();
    // A loop can never be matched, so it would sit in the complement as a 1-cycle.
    if n % k != 0 || g.loop_count() > 0 {
        return Ok(0);
    }
    let mut c = Counter::new(g, k, limit);
    c.search(0);
    Ok(c.count)
}

/// Exact number `cf_k` of `k`-cycle factors of a cubic multigraph.
///
/// Parallel edges are distinguishable. Any loop forces `cf_k = 0` for `k >= 3`.
pub fn count_cycle_factors(g: &Multigraph, k: usize) -> Result<u64> {
    count_up_to(g, k, u64::MAX)
}

pub fn has_cycle_factor(g: &Multigraph, k: usize) -> Result<bool> {
    Ok(count_up_to(g, k, 1)? > 0)
}

/// `(n/k)! (2k)^(n/k)`: rooted, ordered, directed factors per cycle factor.
pub fn rod_scale(n: usize, k: usize) -> BigUint {
    let c = (n / k) as u64;
    factorial(c) * pow_u(2 * k as u64, c)
}

/// Exact `Y_k = cf_k (n/k)! (2k)^(n/k)`.
pub fn count_rod(g: &Multigraph, k: usize) -> Result<BigUint> {
    let cf = count_cycle_factors(g, k)?;
    if cf == 0 {
        return Ok(BigUint::zero());
    }
    Ok(rod_scale(g.n(), k) * cf)
}

/// A rooted, ordered, directed `k`-cycle factor written as a vertex sequence
/// cut into consecutive blocks of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RodFactor {
    pub k: usize,
    pub sequence: Vec<u32>,
}

impl RodFactor {
    pub fn cycles(&self) -> impl Iterator<Item = &[u32]> {
        self.sequence.chunks(self.k)
    }

    /// True when the blocks partition `0..n` and every cycle edge is in `g`.
    pub fn verify(&self, g: &Multigraph) -> bool {
        let n = g.n();
        if self.k < 3 || self.sequence.len() != n || n % self.k != 0 {
            return false;
        }
        let mut seen = vec![false; n];
        for &v in &self.sequence {
            if v as usize >= n || seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
        }
        let adj = g.simple_adjacency();
        self.cycles().all(|c| {
            (0..c.len()).all(|i| adj[c[i] as usize].binary_search(&c[(i + 1) % c.len()]).is_ok())
        })
    }
}

/// Exact and asymptotic first moments of `Y_k` and `cf_k` over the
/// configuration model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub n: usize,
    pub k: usize,
    #[serde(serialize_with = "ser_rat")]
    pub exact_e_y: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub exact_e_cf: BigRational,
    pub exact_e_y_float: f64,
    pub exact_e_cf_float: f64,
    /// `sqrt(2 pi n) (4/3)^(n/2)`.
    pub asymptotic_e_y: f64,
    /// `sqrt(k) (e (4/3)^(k/2) / (2n))^(n/k)`.
    pub asymptotic_e_cf: f64,
    pub ln_asymptotic_e_y: f64,
    pub ln_asymptotic_e_cf: f64,
}

/// Exact `E[Y_k] = n! 6^n M(n) / M(3n)`, which does not depend on `k`.
pub fn exact_expected_rod(n: usize) -> BigRational {
    let n64 = n as u64;
    ratio(factorial(n64) * pow_u(6, n64) * matchings(n64), matchings(3 * n64))
}

pub fn ln_asymptotic_e_y(n: usize) -> f64 {
    let n = n as f64;
    0.5 * (2.0 * std::f64::consts::PI * n).ln() + 0.5 * n * (4f64 / 3.0).ln()
}

pub fn ln_asymptotic_e_cf(n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    0.5 * k.ln() + (n / k) * (1.0 + 0.5 * k * (4f64 / 3.0).ln() - (2.0 * n).ln())
}

pub fn expected_moments(n: usize, k: usize) -> Result<MomentReport> {
    if k == 0 || n == 0 || n % k != 0 || n % 2 == 1 {
        return Err(Error::invalid(format!("need k | n and n even (n={n}, k={k})")));
    }
    let exact_e_y = exact_expected_rod(n);
    let exact_e_cf = &exact_e_y / int(rod_scale(n, k));
    let (ly, lc) = (ln_asymptotic_e_y(n), ln_asymptotic_e_cf(n, k));
    Ok(MomentReport {
        n,
        k,
        exact_e_y_float: to_f64(&exact_e_y),
        exact_e_cf_float: to_f64(&exact_e_cf),
        exact_e_y,
        exact_e_cf,
        asymptotic_e_y: ly.exp(),
        asymptotic_e_cf: lc.exp(),
        ln_asymptotic_e_y: ly,
        ln_asymptotic_e_cf: lc,
    })
}

/// Largest `n` accepted by [`mc_mean_cf`].
pub const MC_MAX_N: usize = 60;

/// Mean of `cf_k` over uniform configuration-model pairings.
pub fn mc_mean_cf(n: usize, k: usize, samples: u64, seed: u64) -> Result<Estimate> {
    if k < 3 {
        return Err(Error::invalid("cycle length k must be at least 3"));
    }
    if n > MC_MAX_N {
        return Err(Error::Budget(format!("exact counting is limited to n <= {MC_MAX_N}")));
    }
    if n % 2 == 1 || samples == 0 {
        return Err(Error::invalid("need n even and at least one sample"));
    }
    let (sum, sum_sq) = integer_trials(seed, samples, |rng| {
        let g = project(&sample_pairing_with(n, 3, rng).expect("n even"));
        count_cycle_factors(&g, k).expect("cubic by construction")
    });
    Ok(Estimate::from_sums(samples, sum, sum_sq))
}

/// One row of a divisor scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub k: usize,
    pub k0: f64,
    /// Fraction of sampled pairings with `cf_k > 0`.
    pub empirical_freq: f64,
    pub mean_cf: f64,
    pub mean_cf_se: f64,
    pub exact_e_cf: f64,
}

/// For every divisor `k >= 3` of `n`, samples pairings (trial `i` uses stream
/// `(seed, i)` for every `k`) and reports existence frequency and mean `cf_k`.
pub fn factor_scan(n: usize, samples: u64, seed: u64) -> Result<Vec<ScanRow>> {
    if n > MC_MAX_N {
        return Err(Error::Budget(format!("exact counting is limited to n <= {MC_MAX_N}")));
    }
    let k0 = threshold_k0(n as f64)?;
    let mut rows = Vec::new();
    for k in (3..=n).filter(|k| n % k == 0) {
        let (hits, _) = integer_trials(seed, samples, |rng| {
            let g = project(&sample_pairing_with(n, 3, rng).expect("n even"));
            has_cycle_factor(&g, k).expect("cubic") as u64
        });
        let mean = mc_mean_cf(n, k, samples, seed)?;
        rows.push(ScanRow {
            k,
            k0,
            empirical_freq: hits as f64 / samples as f64,
            mean_cf: mean.mean,
            mean_cf_se: mean.std_error,
            exact_e_cf: expected_moments(n, k)?.exact_e_cf_float,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graph_counts() {
        let k4 = Multigraph::complete(4);
        assert_eq!(count_cycle_factors(&k4, 4).unwrap(), 3);
        assert_eq!(count_cycle_factors(&k4, 3).unwrap(), 0);
        assert!(has_cycle_factor(&k4, 4).unwrap());
        assert!(!has_cycle_factor(&k4, 3).unwrap());
        assert_eq!(count_rod(&k4, 4).unwrap(), BigUint::from(24u32));
        let k33 = Multigraph::complete_bipartite(3, 3);
        assert_eq!(count_cycle_factors(&k33, 6).unwrap(), 6);
        assert_eq!(count_rod(&k33, 6).unwrap(), BigUint::from(72u32));
        assert_eq!(count_cycle_factors(&k33, 3).unwrap(), 0);
        let p = Multigraph::petersen();
        // Each of the 6 perfect matchings leaves two 5-cycles; no Hamilton cycle.
        assert_eq!(count_cycle_factors(&p, 5).unwrap(), 6);
        assert!(has_cycle_factor(&p, 5).unwrap());
        assert!(!has_cycle_factor(&p, 10).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(count_cycle_factors(&Multigraph::complete(5), 5).is_err());
        assert!(count_cycle_factors(&Multigraph::complete(4), 2).is_err());
    }

    #[test]
    fn loops_and_parallel_edges() {
        // Vertex 0 carries a loop: no factor can exist.
        let g = Multigraph::from_edges(4, &[(0, 0), (0, 1), (1, 2), (1, 3), (2, 3), (2, 3)]).unwrap();
        assert!(g.is_regular(3));
        assert_eq!(count_cycle_factors(&g, 4).unwrap(), 0);
        // A 4-cycle 0-1-2-3 with the chords 0-2 and 1-3 doubled: cf_4 counts
        // the 4-cycles using each parallel copy separately.
        let g = Multigraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]).unwrap();
        assert_eq!(count_cycle_factors(&g, 4).unwrap(), 3);
        // Theta-like multigraph on 4 vertices: 0=1 double, 2=3 double, 0-2, 1-3.
        let g = Multigraph::from_edges(4, &[(0, 1), (0, 1), (2, 3), (2, 3), (0, 2), (1, 3)]).unwrap();
        // 4-cycles 0-1-3-2-0 use one of two copies of 0-1 and of 2-3.
        assert_eq!(count_cycle_factors(&g, 4).unwrap(), 4);
    }

    #[test]
    fn rod_factor_verification() {
        let k4 = Multigraph::complete(4);
        assert!(RodFactor { k: 4, sequence: vec![2, 0, 3, 1] }.verify(&k4));
        assert!(!RodFactor { k: 4, sequence: vec![2, 0, 3, 3] }.verify(&k4));
        let c = Multigraph::cycle(6);
        assert!(RodFactor { k: 6, sequence: vec![0, 1, 2, 3, 4, 5] }.verify(&c));
        assert!(!RodFactor { k: 6, sequence: vec![0, 2, 1, 3, 4, 5] }.verify(&c));
    }

    #[test]
    fn moments_at_n4() {
        let r = expected_moments(4, 4).unwrap();
        assert_eq!(r.exact_e_y, ratio(93312u32.into(), 10395u32.into()));
        assert_eq!(r.exact_e_y, &r.exact_e_cf * int(rod_scale(4, 4)));
        assert!((r.asymptotic_e_y - r.exact_e_y_float).abs() / r.exact_e_y_float < 0.01);
        assert!(expected_moments(6, 4).is_err());
    }

    #[test]
    fn threshold_values() {
        assert!((kappa0() - 4.8188).abs() < 1e-4);
        for n in [10.0, 1e3, 1e6] {
            let direct = 2.0 * (2.0 * n / std::f64::consts::E).ln() / (4f64 / 3.0).ln();
            let k0 = threshold_k0(n).unwrap();
            assert!((k0 - direct).abs() <= 1e-12 * direct.abs());
        }
        assert!(threshold_k0(100.0).unwrap() < threshold_k0(101.0).unwrap());
        assert!(threshold_k0(1.0).is_err());
    }

    #[test]
    fn expected_cf_vanishes_below_threshold() {
        for n in [10_000usize, 1_000_000] {
            let k0 = threshold_k0(n as f64).unwrap();
            let ln_n = (n as f64).ln();
            let k = (k0 - ln_n * ln_n / n as f64).floor() as usize;
            assert!(ln_asymptotic_e_cf(n, k) < 0.0, "n={n} k={k}");
        }
    }

    #[test]
    fn monte_carlo_mean_small() {
        let e = mc_mean_cf(4, 4, 10_000, 1).unwrap();
        let exact = 93312.0 / 10395.0 / 8.0;
        assert!(e.z_score(exact) < 5.0, "{e:?} vs {exact}");
        assert!(mc_mean_cf(4, 2, 10, 1).is_err());
        assert!(mc_mean_cf(62, 31, 10, 1).is_err());
    }
}
