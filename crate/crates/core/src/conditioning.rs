//! Small-subgraph-conditioning constants, the limit variable `W`, and the
//! planted-factor cycle-count experiment.
//!
//! For cubic pairings the short-cycle counts `X_i` are asymptotically
//! Poisson with means `lambda_i = 2^i / (2i)`. Planting a `k`-cycle factor
//! shifts these to `lambda_i (1 + delta_i)` with `delta_i = ((-1)^i - 1) / 2^i`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::combinatorics::{rat_string, to_f64};
use crate::error::{Error, Result};
use crate::pairing::{cycle_census, Pairing};
use crate::power_series::ser_rat;
use crate::rng::{collect_trials, integer_trials, Estimate};

/// Exact `lambda_i` and `delta_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditioningConstants {
    pub i: u32,
    #[serde(serialize_with = "ser_rat")]
    pub lambda: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub delta: BigRational,
}

impl ConditioningConstants {
    /// `lambda_i (1 + delta_i)`, the planted mean of `X_i`.
    pub fn planted_mean(&self) -> BigRational {
        &self.lambda * (BigRational::one() + &self.delta)
    }
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e as usize
}

pub fn constants(i: u32) -> Result<ConditioningConstants> {
    if i == 0 {
        return Err(Error::invalid("cycle length i must be at least 1"));
    }
    let lambda = BigRational::new(pow2(i), BigInt::from(2 * i));
    let delta = if i % 2 == 0 {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::from(-2), pow2(i))
    };
    Ok(ConditioningConstants { i, lambda, delta })
}

/// Exact partial sum `sum_{i <= t} lambda_i delta_i^2`, which increases to `ln 3`.
pub fn sum_check(t: u32) -> Result<BigRational> {
    if t == 0 {
        return Err(Error::invalid("T must be at least 1"));
    }
    let mut acc = BigRational::zero();
    for i in 1..=t {
        let c = constants(i)?;
        acc += &c.lambda * &c.delta * &c.delta;
    }
    Ok(acc)
}

/// Largest mean sampled by inversion; larger means use the exact
/// transformed-rejection sampler of `rand_distr`.
pub const INVERSION_MAX_MEAN: f64 = 30.0;

/// Poisson draw by sequential inversion for small means.
pub fn poisson<R: Rng>(mean: f64, rng: &mut R) -> u64 {
    if mean <= INVERSION_MAX_MEAN {
        let u: f64 = rng.random();
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut x = 0u64;
        while u > cdf && p > 0.0 {
            x += 1;
            p *= mean / x as f64;
            cdf += p;
        }
        x
    } else {
        Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
    }
}

/// One draw of `W_J = prod_{j=3..J} (1 + delta_j)^{Z_j} exp(-delta_j lambda_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitLawSample {
    pub truncation: u32,
    /// `Z_3..=Z_J`.
    pub z: Vec<u64>,
    pub w: f64,
}

struct Factor {
    lambda: f64,
    ln_one_plus_delta: f64,
    delta: f64,
}

fn factors(j_max: u32, odd_only: bool) -> Vec<(u32, Factor)> {
    (3..=j_max)
        .filter(|j| !odd_only || j % 2 == 1)
        .map(|j| {
            let c = constants(j).expect("j >= 3");
            let delta = to_f64(&c.delta);
            (j, Factor { lambda: to_f64(&c.lambda), ln_one_plus_delta: (1.0 + delta).ln(), delta })
        })
        .collect()
}

/// Draws every `Z_j`, including those whose factor is identically 1.
pub fn sample_w_once<R: Rng>(j_max: u32, rng: &mut R) -> Result<LimitLawSample> {
    if j_max < 3 {
        return Err(Error::invalid("truncation J must be at least 3"));
    }
    let mut z = Vec::new();
    let mut ln_w = 0.0;
    for (_, f) in factors(j_max, false) {
        let zj = poisson(f.lambda, rng);
        z.push(zj);
        if f.delta != 0.0 {
            ln_w += zj as f64 * f.ln_one_plus_delta - f.delta * f.lambda;
        }
    }
    Ok(LimitLawSample { truncation: j_max, z, w: ln_w.exp() })
}

/// Summary of a batch of `W_J` draws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WBatch {
    pub truncation: u32,
    pub w: Estimate,
    pub ln_w: Estimate,
}

/// `batch` independent draws of `W_J`; trial `i` uses stream `(seed, i)`.
/// Only odd `j` are sampled since even `j` contribute a factor of exactly 1.
pub fn sample_w(j_max: u32, seed: u64, batch: u64) -> Result<WBatch> {
    if j_max < 3 {
        return Err(Error::invalid("truncation J must be at least 3"));
    }
    if batch == 0 {
        return Err(Error::invalid("batch must be at least 1"));
    }
    let fs = factors(j_max, true);
    let logs: Vec<f64> = collect_trials(seed, batch, |rng| {
        fs.iter()
            .map(|(_, f)| poisson(f.lambda, rng) as f64 * f.ln_one_plus_delta - f.delta * f.lambda)
            .sum()
    });
    let ws: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    Ok(WBatch { truncation: j_max, w: Estimate::from_values(&ws), ln_w: Estimate::from_values(&logs) })
}

/// Which rooted, ordered, directed factor to plant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Plant {
    /// Cycles `(0..k), (k..2k), ...` in vertex order.
    Canonical,
    /// A fresh uniform factor in every trial.
    Random,
}

/// The pairs of a planted factor: vertex `v` owns points `3v, 3v+1, 3v+2`, and
/// consecutive cycle vertices `v -> w` are joined by the pair `(3v+1, 3w)`.
fn plant_pairs(order: &[u32], k: usize, partner: &mut [u32]) {
    for block in order.chunks_exact(k) {
        for i in 0..k {
            let (v, w) = (block[i], block[(i + 1) % k]);
            partner[(3 * v + 1) as usize] = 3 * w;
            partner[(3 * w) as usize] = 3 * v + 1;
        }
    }
}

/// Uniform pairing conditioned to contain the planted factor given by the
/// vertex order `order`; the free points `3v+2` are matched uniformly.
pub fn planted_pairing<R: Rng>(order: &[u32], k: usize, rng: &mut R) -> Result<Pairing> {
    let n = order.len();
    if k < 3 || n % k != 0 || n % 2 == 1 {
        return Err(Error::invalid(format!("need k >= 3, k | n, n even (n={n}, k={k})")));
    }
    let mut partner = vec![u32::MAX; 3 * n];
    plant_pairs(order, k, &mut partner);
    let mut free: Vec<u32> = (0..n as u32).map(|v| 3 * v + 2).collect();
    free.shuffle(rng);
    for pair in free.chunks_exact(2) {
        partner[pair[0] as usize] = pair[1];
        partner[pair[1] as usize] = pair[0];
    }
    Pairing::from_partner(n, 3, partner)
}


/// Monte Carlo estimate of `E[X_i | D in pairing]` for a planted `k`-cycle factor `D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlantedReport {
    pub n: usize,
    pub k: usize,
    pub i: u32,
    pub plant: Plant,
    pub estimate: Estimate,
    /// `lambda_i (1 + delta_i)` as `"p/q"`.
    pub target: String,
    pub target_float: f64,
}

pub fn planted_moment(n: usize, k: usize, i: u32, trials: u64, seed: u64) -> Result<PlantedReport> {
    planted_moment_with(n, k, i, trials, seed, Plant::Canonical)
}

pub fn planted_moment_with(n: usize, k: usize, i: u32, trials: u64, seed: u64, plant: Plant) -> Result<PlantedReport> {
    if i < 3 || i as usize > crate::pairing::CENSUS_MAX_LENGTH {
        return Err(Error::invalid("planted moments need 3 <= i <= 12"));
    }
    if k < 3 || n % k != 0 || n % 2 == 1 {
        return Err(Error::invalid(format!("need k >= 3, k | n, n even (n={n}, k={k})")));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let canonical: Vec<u32> = (0..n as u32).collect();
    let (sum, sum_sq) = integer_trials(seed, trials, |rng| {
        let order = match plant {
            Plant::Canonical => canonical.clone(),
            Plant::Random => {
                let mut o = canonical.clone();
                o.shuffle(rng);
                o
            }
        };
        let p = planted_pairing(&order, k, rng).expect("validated shape");
        cycle_census(&crate::pairing::project(&p), i as usize).expect("valid length").get(i as usize)
    });
    let target = constants(i)?.planted_mean();
    Ok(PlantedReport {
        n,
        k,
        i,
        plant,
        estimate: Estimate::from_sums(trials, sum, sum_sq),
        target_float: to_f64(&target),
        target: rat_string(&target),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::for_each_pairing;
    use crate::rng::stream_rng;
    use std::collections::HashMap;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn constant_examples() {
        let c3 = constants(3).unwrap();
        assert_eq!((c3.lambda.clone(), c3.delta.clone()), (q(4, 3), q(-1, 4)));
        assert_eq!(c3.planted_mean(), q(1, 1));
        assert_eq!(constants(2).unwrap().delta, q(0, 1));
        let c1 = constants(1).unwrap();
        assert_eq!((c1.lambda, c1.delta), (q(1, 1), q(-1, 1)));
        assert_eq!(constants(4).unwrap().planted_mean(), q(2, 1));
        assert_eq!(constants(5).unwrap().planted_mean(), q(3, 1));
        for i in 1..20u32 {
            let c = constants(i).unwrap();
            let term = &c.lambda * &c.delta * &c.delta;
            let expect = if i % 2 == 1 { q(2, i as i64 * (1 << i)) } else { q(0, 1) };
            assert_eq!(term, expect);
        }
    }

    #[test]
    fn partial_sums() {
        assert_eq!(sum_check(1).unwrap(), q(1, 1));
        assert_eq!(sum_check(4).unwrap(), sum_check(3).unwrap());
        let s = to_f64(&sum_check(60).unwrap());
        assert!((s - 3f64.ln()).abs() < 1e-12);
        let mut prev = q(0, 1);
        for t in 1..30 {
            let s = sum_check(t).unwrap();
            assert!(s >= prev && to_f64(&s) <= 3f64.ln());
            prev = s;
        }
    }

    #[test]
    fn poisson_moments() {
        let mut rng = stream_rng(3, 0);
        for mean in [0.5, 4.0 / 3.0, 12.0, 45.0] {
            let xs: Vec<f64> = (0..100_000).map(|_| poisson(mean, &mut rng) as f64).collect();
            let e = Estimate::from_values(&xs);
            assert!(e.z_score(mean) < 5.0, "mean {mean}: {e:?}");
            assert!((e.variance / mean - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn w_with_single_factor_has_unit_mean() {
        let b = sample_w(3, 9, 200_000).unwrap();
        assert!(b.w.z_score(1.0) < 5.0, "{:?}", b.w);
        let one = sample_w_once(6, &mut stream_rng(1, 0)).unwrap();
        assert_eq!(one.z.len(), 4);
        assert!(one.w > 0.0);
        assert!(sample_w(2, 1, 10).is_err());
    }

    #[test]
    fn w_is_deterministic() {
        assert_eq!(sample_w(11, 4, 1000).unwrap(), sample_w(11, 4, 1000).unwrap());
    }

    #[test]
    fn planted_completions_are_uniform() {
        // n = 4: every pairing containing the planted factor is one of M(4) = 3 completions.
        let order = [0u32, 1, 2, 3];
        let mut planted = vec![u32::MAX; 12];
        plant_pairs(&order, 4, &mut planted);
        let mut completions = 0;
        for_each_pairing(12, |p| {
            if planted.iter().enumerate().all(|(i, &q)| q == u32::MAX || p[i] == q) {
                completions += 1;
            }
        });
        assert_eq!(completions, 3);
        let mut freq: HashMap<Vec<u32>, u64> = HashMap::new();
        let mut rng = stream_rng(2, 0);
        let trials = 30_000u64;
        for _ in 0..trials {
            let p = planted_pairing(&order, 4, &mut rng).unwrap();
            *freq.entry(p.partners().to_vec()).or_insert(0) += 1;
        }
        assert_eq!(freq.len(), 3);
        let se = ((2.0 / 9.0) / trials as f64).sqrt();
        assert!(freq.values().all(|&c| (c as f64 / trials as f64 - 1.0 / 3.0).abs() < 5.0 * se));
    }

    #[test]
    fn planted_factor_is_present() {
        let p = planted_pairing(&(0..12).collect::<Vec<u32>>(), 4, &mut stream_rng(1, 0)).unwrap();
        let g = crate::pairing::project(&p);
        let rod = crate::cycle_factors::RodFactor { k: 4, sequence: (0..12).collect() };
        assert!(rod.verify(&g));
    }

    #[test]
    fn canonical_and_random_plants_agree() {
        let a = planted_moment_with(600, 30, 3, 20_000, 1, Plant::Canonical).unwrap();
        let b = planted_moment_with(600, 30, 3, 20_000, 2, Plant::Random).unwrap();
        let se = (a.estimate.std_error.powi(2) + b.estimate.std_error.powi(2)).sqrt();
        assert!((a.estimate.mean - b.estimate.mean).abs() < 5.0 * se);
    }
}
