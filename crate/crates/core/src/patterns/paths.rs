//! Path-length statistics of uniform patterns in `I_{0,m}`.
//!
//! The path lengths of a uniform pattern form a uniform composition of `n`
//! into `m` parts of size at least 2.

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::combinatorics::{binomial, ratio};
use crate::error::{Error, Result};
use crate::rng::{collect_trials, Estimate};

/// Uniform composition of `n` into `m` parts, each at least 2.
pub fn sample_composition<R: Rng>(n: usize, m: usize, rng: &mut R) -> Result<Vec<usize>> {
    if m == 0 || 2 * m > n {
        return Err(Error::invalid(format!("need 1 <= m and 2m <= n (n={n}, m={m})")));
    }
    // Parts minus one form a composition of n - m into m positive parts, i.e. a
    // choice of m - 1 cut points among the n - m - 1 interior gaps.
    let gaps = n - m - 1;
    let mut cuts: Vec<usize> = if m > 1 { index::sample(rng, gaps, m - 1).into_vec() } else { Vec::new() };
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(m);
    let mut prev = 0;
    for c in cuts {
        parts.push(c + 1 - prev + 1);
        prev = c + 1;
    }
    parts.push(n - m - prev + 1);
    Ok(parts)
}

/// Exact probability that a given part of a uniform composition of `n` into
/// `m` parts of size at least 2 equals `l`.
pub fn composition_part_probability(n: usize, m: usize, l: usize) -> BigRational {
    let count = |total: usize, parts: usize| -> BigUint {
        if parts == 0 {
            return BigUint::from((total == 0) as u32);
        }
        if total < 2 * parts {
            return BigUint::from(0u32);
        }
        binomial((total - parts - 1) as u64, (parts - 1) as u64)
    };
    if l < 2 || l > n {
        return ratio(0u32.into(), 1u32.into());
    }
    ratio(count(n - l, m - 1), count(n, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathStatsConfig {
    /// Length threshold `l` of the tail event.
    pub ell: usize,
    /// Count threshold `t` of the tail event.
    pub t: usize,
    /// Base `b` in the bound `(4 e m / (t b^l))^t`.
    pub base: f64,
    /// Half-width parameter of the band `(2-eps)/(2+eps)^l <= p_l <= (2+eps)/(2-eps)^l`.
    pub eps: f64,
    /// Largest length reported in the mean frequency table.
    pub max_reported: usize,
}

impl Default for PathStatsConfig {
    fn default() -> Self {
        PathStatsConfig { ell: 10, t: 20, base: 1.9, eps: 0.1, max_reported: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStatsReport {
    pub n: usize,
    pub m: usize,
    pub config: PathStatsConfig,
    /// Frequency of samples with at least `t` paths of length at least `l`.
    pub tail: Estimate,
    pub tail_bound: f64,
    /// True when the empirical tail exceeds the bound by more than 4 standard errors.
    pub tail_violated: bool,
    pub band_lo: f64,
    pub band_hi: f64,
    /// Mean over samples of the frequency of length-2 paths.
    pub p2: Estimate,
    /// Fraction of samples whose length-2 frequency lies inside the band.
    pub p2_in_band: f64,
    /// `(l, mean frequency of length-l paths)` for `2 <= l <= max_reported`.
    pub mean_frequencies: Vec<(usize, f64)>,
}

pub fn path_stats_experiment(
    n: usize,
    m: usize,
    samples: u64,
    seed: u64,
    config: PathStatsConfig,
) -> Result<PathStatsReport> {
    if 2 * m > n || m == 0 {
        return Err(Error::invalid(format!("need 1 <= m and 2m <= n (n={n}, m={m})")));
    }
    if samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    let top = config.max_reported.max(2);
    let per_sample = collect_trials(seed, samples, |rng| {
        let parts = sample_composition(n, m, rng).expect("validated");
        let long = parts.iter().filter(|&&p| p >= config.ell).count();
        let mut freq = vec![0u32; top + 1];
        for &p in &parts {
            if p <= top {
                freq[p] += 1;
            }
        }
        (long >= config.t, freq)
    });
    let tail_hits = per_sample.iter().filter(|s| s.0).count() as u64;
    let tail = Estimate::from_hits(samples, tail_hits);
    let mf = m as f64;
    let tail_bound = (4.0 * std::f64::consts::E * mf / (config.t as f64 * config.base.powi(config.ell as i32)))
        .powi(config.t as i32);
    let (e2p, e2m) = (2.0 + config.eps, 2.0 - config.eps);
    let (band_lo, band_hi) = (e2m / e2p.powi(2), e2p / e2m.powi(2));
    let p2_values: Vec<f64> = per_sample.iter().map(|s| s.1[2] as f64 / mf).collect();
    let p2_in_band = p2_values.iter().filter(|&&p| p >= band_lo && p <= band_hi).count() as f64 / samples as f64;
    let mean_frequencies = (2..=top)
        .map(|l| (l, per_sample.iter().map(|s| s.1[l] as f64).sum::<f64>() / (mf * samples as f64)))
        .collect();
    Ok(PathStatsReport {
        n,
        m,
        config,
        tail_violated: tail.mean > tail_bound + 4.0 * tail.std_error.max(1.0 / samples as f64),
        tail,
        tail_bound,
        band_lo,
        band_hi,
        p2: Estimate::from_values(&p2_values),
        p2_in_band,
        mean_frequencies,
    })
}
