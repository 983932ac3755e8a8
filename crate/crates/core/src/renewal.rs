//! Hitting probabilities of renewal processes with replacement (`R_k`),
//! without replacement (`P_k`) and size-biased without replacement (`Q_k`).
//!
//! For a multiset `X` of `m` lengths summing to `n`, `P_k` is the probability
//! that `k` is a prefix sum of a uniformly random ordering of `X`. The exact
//! computation rests on the prefix-subset identity: `k` is hit at step `j`
//! exactly when the first `j` slots hold a `j`-element sub-multiset of sum
//! `k`, which happens with probability `1 / C(m, j)` for each such subset.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::combinatorics::{binomial, rat_string, to_f64};
use crate::error::{Error, Result};
use crate::lengths::LengthMultiset;
use crate::power_series::{decay_slope, limit_constants, ser_rat};
use crate::rng::{integer_trials, Estimate};

/// Which renewal process is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    WithReplacement,
    WithoutReplacement,
    SizeBiased,
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "with" | "with_replacement" => Ok(Variant::WithReplacement),
            "without" | "without_replacement" => Ok(Variant::WithoutReplacement),
            "size_biased" | "sizebiased" | "biased" => Ok(Variant::SizeBiased),
            other => Err(Error::Parse(format!("unknown variant `{other}`"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::WithReplacement => "with_replacement",
            Variant::WithoutReplacement => "without_replacement",
            Variant::SizeBiased => "size_biased",
        })
    }
}

/// An exact hitting probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitProbability {
    #[serde(serialize_with = "ser_rat")]
    pub value: BigRational,
    pub variant: Variant,
    pub k: u64,
}

impl HitProbability {
    pub fn to_f64(&self) -> f64 {
        to_f64(&self.value)
    }

    pub fn exact_string(&self) -> String {
        rat_string(&self.value)
    }
}

fn check_k(k: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("the target k must be at least 1"));
    }
    Ok(())
}

fn rat(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `R_0..=R_top` for the i.i.d. process with step law `p_l = m_l / m`.
pub fn with_replacement_sequence(lengths: &LengthMultiset, top: u64) -> Vec<BigRational> {
    let m = lengths.m();
    let steps: Vec<(usize, BigRational)> =
        lengths.counts().iter().map(|(&l, &c)| (l as usize, rat(c, m))).collect();
    let top = top as usize;
    let mut r: Vec<BigRational> = Vec::with_capacity(top + 1);
    r.push(BigRational::one());
    for j in 1..=top {
        let mut acc = BigRational::zero();
        for (l, p) in &steps {
            if *l <= j {
                acc += p * &r[j - l];
            }
        }
        r.push(acc);
    }
    r
}

pub fn hit_with_replacement(lengths: &LengthMultiset, k: u64) -> Result<HitProbability> {
    check_k(k)?;
    let value = with_replacement_sequence(lengths, k).pop().expect("non-empty");
    Ok(HitProbability { value, variant: Variant::WithReplacement, k })
}

/// `W[s][j]`: number of `j`-element sub-multisets with sum `s`, for `s <= top`.
fn subset_counts(lengths: &LengthMultiset, top: usize) -> Vec<Vec<BigUint>> {
    let jmax = (lengths.m() as usize).min(top);
    let mut w = vec![vec![BigUint::zero(); jmax + 1]; top + 1];
    w[0][0] = BigUint::one();
    for (&len, &mult) in lengths.counts() {
        let len = len as usize;
        if len > top {
            continue;
        }
        let amax = (mult as usize).min(top / len);
        let choose: Vec<BigUint> = (0..=amax).map(|a| binomial(mult, a as u64)).collect();
        let mut next = vec![vec![BigUint::zero(); jmax + 1]; top + 1];
        for s in 0..=top {
            for j in 0..=jmax {
                if w[s][j].is_zero() {
                    continue;
                }
                for (a, c) in choose.iter().enumerate() {
                    let (s2, j2) = (s + a * len, j + a);
                    if s2 > top || j2 > jmax {
                        break;
                    }
                    next[s2][j2] += &w[s][j] * c;
                }
            }
        }
        w = next;
    }
    w
}

/// `P_0..=P_top` for the without-replacement process, with `P_0 = 1`.
pub fn without_replacement_sequence(lengths: &LengthMultiset, top: u64) -> Vec<BigRational> {
    let top = top as usize;
    let w = subset_counts(lengths, top);
    let m = lengths.m();
    let inv_choose: Vec<BigRational> = (0..w[0].len())
        .map(|j| BigRational::new(BigInt::one(), BigInt::from(binomial(m, j as u64))))
        .collect();
    (0..=top)
        .map(|s| {
            if s == 0 {
                return BigRational::one();
            }
            let mut acc = BigRational::zero();
            for (j, count) in w[s].iter().enumerate() {
                if !count.is_zero() {
                    acc += BigRational::from_integer(BigInt::from(count.clone())) * &inv_choose[j];
                }
            }
            acc
        })
        .collect()
}

pub fn hit_without_replacement(lengths: &LengthMultiset, k: u64) -> Result<HitProbability> {
    check_k(k)?;
    let value = if k > lengths.n() {
        BigRational::zero()
    } else {
        without_replacement_sequence(lengths, k).pop().expect("non-empty")
    };
    Ok(HitProbability { value, variant: Variant::WithoutReplacement, k })
}

/// `Q_0..=Q_top` for the size-biased process, with `Q_0 = 1`.
pub fn size_biased_sequence(lengths: &LengthMultiset, top: u64) -> Vec<BigRational> {
    let top_u = top as usize;
    let n = lengths.n();
    let mut q = vec![BigRational::zero(); top_u + 1];
    q[0] = BigRational::one();
    for (&len, &mult) in lengths.counts() {
        if len > top {
            continue;
        }
        let weight = rat(len * mult, n);
        let rest: Vec<BigRational> = match lengths.without_one(len) {
            Some(rest) => without_replacement_sequence(&rest, top - len),
            None => {
                let mut v = vec![BigRational::zero(); (top - len) as usize + 1];
                v[0] = BigRational::one();
                v
            }
        };
        for (k, qk) in q.iter_mut().enumerate().skip(len as usize) {
            *qk += &weight * &rest[k - len as usize];
        }
    }
    q
}

pub fn hit_size_biased(lengths: &LengthMultiset, k: u64) -> Result<HitProbability> {
    check_k(k)?;
    let value = if k > lengths.n() {
        BigRational::zero()
    } else {
        size_biased_sequence(lengths, k).pop().expect("non-empty")
    };
    Ok(HitProbability { value, variant: Variant::SizeBiased, k })
}

pub fn hit(lengths: &LengthMultiset, k: u64, variant: Variant) -> Result<HitProbability> {
    match variant {
        Variant::WithReplacement => hit_with_replacement(lengths, k),
        Variant::WithoutReplacement => hit_without_replacement(lengths, k),
        Variant::SizeBiased => hit_size_biased(lengths, k),
    }
}

/// Largest `m` accepted by the brute-force oracle.
pub const ORACLE_MAX_M: u64 = 9;
/// Largest `k` accepted by the with-replacement brute-force oracle.
pub const ORACLE_MAX_K_WITH: u64 = 24;

fn next_permutation(v: &mut [u64]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Brute-force hitting probabilities for every `k` in `0..=n`, obtained by
/// listing all distinct orderings of the multiset.
///
/// Distinct orderings are equally likely under a uniform permutation because
/// each one is produced by the same number of permutations.
pub fn enumerate_oracle_all(lengths: &LengthMultiset, variant: Variant) -> Result<Vec<BigRational>> {
    if lengths.m() > ORACLE_MAX_M {
        return Err(Error::invalid(format!("oracle enumeration needs m <= {ORACLE_MAX_M}")));
    }
    let n = lengths.n() as usize;
    if variant == Variant::WithReplacement {
        return (0..=n as u64)
            .map(|k| if k == 0 { Ok(BigRational::one()) } else { enumerate_oracle(lengths, k, variant).map(|h| h.value) })
            .collect();
    }
    let distinct: Vec<u64> = lengths.counts().keys().copied().collect();
    // Per first element: (orderings seen, hits per k).
    let mut per_first: Vec<(u64, Vec<u64>)> = vec![(0, vec![0; n + 1]); distinct.len()];
    let mut perm = lengths.to_sorted_vec();
    loop {
        let slot = distinct.binary_search(&perm[0]).expect("present");
        let entry = &mut per_first[slot];
        entry.0 += 1;
        let mut s = 0usize;
        entry.1[0] += 1;
        for &x in &perm {
            s += x as usize;
            entry.1[s] += 1;
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let mut out = vec![BigRational::zero(); n + 1];
    match variant {
        Variant::WithoutReplacement => {
            let total: u64 = per_first.iter().map(|e| e.0).sum();
            for k in 0..=n {
                let hits: u64 = per_first.iter().map(|e| e.1[k]).sum();
                out[k] = rat(hits, total);
            }
        }
        Variant::SizeBiased => {
            for (slot, (count, hits)) in per_first.iter().enumerate() {
                let len = distinct[slot];
                let weight = rat(len * lengths.multiplicity(len), lengths.n());
                for k in 0..=n {
                    out[k] += &weight * rat(hits[k], *count);
                }
            }
        }
        Variant::WithReplacement => unreachable!(),
    }
    Ok(out)
}

/// Brute-force validator for a single `k`.
///
/// Without replacement and size-biased use ordering enumeration (`m <= 9`).
/// With replacement sums `prod p_l` over all step sequences ending exactly
/// at `k` (`k <= 24`).
pub fn enumerate_oracle(lengths: &LengthMultiset, k: u64, variant: Variant) -> Result<HitProbability> {
    check_k(k)?;
    let value = match variant {
        Variant::WithReplacement => {
            if k > ORACLE_MAX_K_WITH {
                return Err(Error::invalid(format!("with-replacement oracle needs k <= {ORACLE_MAX_K_WITH}")));
            }
            let steps: Vec<(u64, BigRational)> =
                lengths.counts().iter().map(|(&l, &c)| (l, rat(c, lengths.m()))).collect();
            fn walk(remaining: u64, weight: BigRational, steps: &[(u64, BigRational)], acc: &mut BigRational) {
                if remaining == 0 {
                    *acc += weight;
                    return;
                }
                for (l, p) in steps {
                    if *l <= remaining {
                        walk(remaining - l, &weight * p, steps, acc);
                    }
                }
            }
            let mut acc = BigRational::zero();
            walk(k, BigRational::one(), &steps, &mut acc);
            acc
        }
        _ => {
            if k > lengths.n() {
                if lengths.m() > ORACLE_MAX_M {
                    return Err(Error::invalid(format!("oracle enumeration needs m <= {ORACLE_MAX_M}")));
                }
                BigRational::zero()
            } else {
                enumerate_oracle_all(lengths, variant)?.swap_remove(k as usize)
            }
        }
    };
    Ok(HitProbability { value, variant, k })
}

fn hits_once<R: Rng>(items: &mut [u64], n: u64, k: u64, variant: Variant, rng: &mut R) -> bool {
    match variant {
        Variant::WithReplacement => {
            let mut s = 0;
            while s < k {
                s += items[rng.random_range(0..items.len())];
            }
            s == k
        }
        Variant::WithoutReplacement | Variant::SizeBiased => {
            if variant == Variant::SizeBiased {
                // Pick a uniform unit of total length and take the element owning it.
                let mut u = rng.random_range(0..n);
                let mut idx = 0;
                while u >= items[idx] {
                    u -= items[idx];
                    idx += 1;
                }
                items.swap(0, idx);
                items[1..].shuffle(rng);
            } else {
                items.shuffle(rng);
            }
            let mut s = 0;
            for &x in items.iter() {
                s += x;
                if s >= k {
                    break;
                }
            }
            s == k
        }
    }
}

/// Monte Carlo frequency of hitting `k`, with binomial standard error.
///
/// Trial `i` draws from stream `(seed, i)`, so the estimate does not depend on
/// the number of worker threads.
pub fn mc_hit(lengths: &LengthMultiset, k: u64, variant: Variant, trials: u64, seed: u64) -> Result<Estimate> {
    check_k(k)?;
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let base = lengths.to_sorted_vec();
    let n = lengths.n();
    let (hits, _) = integer_trials(seed, trials, |rng| {
        let mut items = base.clone();
        hits_once(&mut items, n, k, variant, rng) as u64
    });
    Ok(Estimate::from_hits(trials, hits as u64))
}

/// Leading and corrected asymptotic predictions for `P_k` and `Q_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticPrediction {
    /// `m / n`.
    #[serde(serialize_with = "ser_rat")]
    pub leading: BigRational,
    /// `m / n - c_f / m`, the second-order prediction for `P_k`.
    #[serde(serialize_with = "ser_rat")]
    pub corrected: BigRational,
    /// The prediction for `Q_k`, which carries no `1/m` term.
    #[serde(serialize_with = "ser_rat")]
    pub size_biased: BigRational,
    /// Fitted slope of `ln |R_j - m/n|` over `j` in `k..=k+window`, if requested.
    pub error_exponent: Option<f64>,
}

pub fn asymptotic_prediction(lengths: &LengthMultiset, k: u64, fit_window: Option<u64>) -> AsymptoticPrediction {
    let leading = rat(lengths.m(), lengths.n());
    let c = limit_constants(lengths);
    let corrected = &leading - &c.correction / BigRational::from_integer(BigInt::from(lengths.m()));
    let error_exponent = fit_window.and_then(|w| {
        let seq: Vec<f64> = with_replacement_sequence(lengths, k + w).iter().map(to_f64).collect();
        decay_slope(&seq, to_f64(&leading), k as usize, (k + w) as usize)
    });
    AsymptoticPrediction { size_biased: leading.clone(), leading, corrected, error_exponent }
}
