//! Exact second moment of `Y_k` at small `n`, assembled two independent ways.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{check_shape, count_n_for_lengths, enumerate_patterns};
use crate::combinatorics::{factorial, int, matchings, pow_u, ratio, to_f64};
use crate::cycle_factors::{count_cycle_factors, exact_expected_rod, rod_scale};
use crate::error::{Error, Result};
use crate::pairing::{for_each_pairing, project, Pairing};
use crate::power_series::ser_rat;

/// Largest `n` for the pattern-side assembly.
pub const ASSEMBLY_MAX_N: usize = 8;
/// Largest `n` for the pairing-side enumeration.
pub const DIRECT_MAX_N: usize = 6;

/// Sum of `N(S)^2` over one pattern class `I_{h,m}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternClassSum {
    pub h: usize,
    pub m: usize,
    pub patterns: u64,
    #[serde(serialize_with = "ser_big")]
    pub sum_n_squared: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub max_n: BigUint,
    /// `sum N(S)^2 / ((m! 2^m)^2 |I_{0,m}|)`, reported for `h = 0`.
    pub normalized: Option<f64>,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondMomentReport {
    pub n: usize,
    pub k: usize,
    #[serde(serialize_with = "ser_rat")]
    pub e_y: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub e_y2: BigRational,
    /// `E[Y^2] / E[Y]^2`.
    #[serde(serialize_with = "ser_rat")]
    pub ratio: BigRational,
    pub ratio_float: f64,
    pub classes: Vec<PatternClassSum>,
    /// Whether `N(S) <= k^(n/k) m! 2^m` held for every path-only pattern.
    pub path_bound_holds: bool,
}

/// `E[Y_k^2] = 6^n / M(3n) * sum_h sum_m M(n-2m) sum_{S in I_{h,m}} N(S)^2`,
/// with every pattern enumerated and `N(S)` computed exactly.
pub fn second_moment_exact(n: usize, k: usize) -> Result<SecondMomentReport> {
    check_shape(n, k)?;
    if n % 2 == 1 {
        return Err(Error::invalid("n must be even"));
    }
    if n > ASSEMBLY_MAX_N {
        return Err(Error::Budget(format!("pattern enumeration is limited to n <= {ASSEMBLY_MAX_N}")));
    }
    let mut cache: HashMap<(usize, Vec<u64>), BigUint> = HashMap::new();
    let mut classes: BTreeMap<(usize, usize), (u64, BigUint, BigUint)> = BTreeMap::new();
    let mut failure = None;
    enumerate_patterns(n, Some(k), |s| {
        let key = (s.h(), s.path_lengths());
        let value = match cache.get(&key) {
            Some(v) => v.clone(),
            None => match count_n_for_lengths(n, k, key.0, &key.1) {
                Ok(v) => {
                    cache.insert(key, v.clone());
                    v
                }
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            },
        };
        let entry = classes.entry((s.h(), s.m())).or_insert((0, BigUint::zero(), BigUint::zero()));
        entry.0 += 1;
        entry.1 += &value * &value;
        if value > entry.2 {
            entry.2 = value;
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let mut total = BigUint::zero();
    let mut out = Vec::new();
    let mut path_bound_holds = true;
    for ((h, m), (patterns, sum, max_n)) in classes {
        total += matchings((n - 2 * m) as u64) * &sum;
        let scale = factorial(m as u64) * pow_u(2, m as u64);
        let normalized = (h == 0).then(|| to_f64(&ratio(sum.clone(), &scale * &scale * patterns)));
        if h == 0 && max_n > pow_u(k as u64, (n / k) as u64) * &scale {
            path_bound_holds = false;
        }
        out.push(PatternClassSum { h, m, patterns, sum_n_squared: sum, max_n, normalized });
    }
    let e_y2 = ratio(pow_u(6, n as u64) * total, matchings(3 * n as u64));
    let e_y = exact_expected_rod(n);
    let r = &e_y2 / (&e_y * &e_y);
    Ok(SecondMomentReport { n, k, ratio_float: to_f64(&r), ratio: r, e_y, e_y2, classes: out, path_bound_holds })
}

/// First and second moments of `Y_k` by enumerating every pairing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectMoments {
    pub n: usize,
    pub k: usize,
    pub pairings: u64,
    #[serde(serialize_with = "ser_rat")]
    pub e_y: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub e_y2: BigRational,
}

pub fn direct_second_moment(n: usize, k: usize) -> Result<DirectMoments> {
    check_shape(n, k)?;
    if n % 2 == 1 {
        return Err(Error::invalid("n must be even"));
    }
    if n > DIRECT_MAX_N {
        return Err(Error::Budget(format!("pairing enumeration is limited to n <= {DIRECT_MAX_N}")));
    }
    let (mut count, mut s1, mut s2) = (0u64, 0u128, 0u128);
    for_each_pairing(3 * n, |partner| {
        let p = Pairing::from_partner(n, 3, partner.to_vec()).expect("valid pairing");
        let cf = count_cycle_factors(&project(&p), k).expect("cubic") as u128;
        count += 1;
        s1 += cf;
        s2 += cf * cf;
    });
    let scale = rod_scale(n, k);
    let total = matchings(3 * n as u64);
    Ok(DirectMoments {
        n,
        k,
        pairings: count,
        e_y: int(&scale * BigUint::from(s1)) / int(total.clone()),
        e_y2: int(&scale * &scale * BigUint::from(s2)) / int(total),
    })
}
