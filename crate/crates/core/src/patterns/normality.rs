//! δ-normality of a path-length distribution: closeness to the geometric law
//! `p_l = 2^(1-l)` for short paths and a decaying envelope for long ones.
//!
//! With `M = ceil(ln ln k / 8)` the short-path clause only constrains lengths
//! `2 <= l <= M`. For every `k` below `exp(exp(16))` this range is empty, so
//! at computable scales the test reduces to `p_1 = 0` plus the long-path
//! envelope `p_l <= gamma_l`, which no realistic distribution meets at
//! `l = 2`. Use [`NormalityParams::from_ln_k`] to reach the regime where
//! the definition has content.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lengths::LengthMultiset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalityParams {
    pub delta: f64,
    /// `ln k`, kept in log form so that astronomically large `k` are representable.
    pub ln_k: f64,
    /// Short/long cutoff `M = ceil(ln ln k / 8)`.
    pub cutoff: u64,
}

impl NormalityParams {
    pub fn new(delta: f64, k: u64) -> Result<Self> {
        if k < 3 {
            return Err(Error::invalid("k must be at least 3"));
        }
        Self::from_ln_k(delta, (k as f64).ln())
    }

    pub fn from_ln_k(delta: f64, ln_k: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0,1)"));
        }
        if !ln_k.is_finite() || ln_k < 3f64.ln() {
            return Err(Error::invalid("k must be at least 3"));
        }
        let cutoff = (ln_k.ln() / 8.0).ceil().max(1.0) as u64;
        Ok(NormalityParams { delta, ln_k, cutoff })
    }

    /// `ln gamma_l = -(4 ln l + l ln(2 - delta))`.
    pub fn ln_gamma(&self, l: u64) -> f64 {
        -(4.0 * (l as f64).ln() + l as f64 * (2.0 - self.delta).ln())
    }

    /// `ln eps_l = ln gamma_l - (ln ln k) / 8`.
    pub fn ln_epsilon(&self, l: u64) -> f64 {
        self.ln_gamma(l) - self.ln_k.ln() / 8.0
    }

    pub fn gamma(&self, l: u64) -> f64 {
        self.ln_gamma(l).exp()
    }

    pub fn epsilon(&self, l: u64) -> f64 {
        self.ln_epsilon(l).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `p_1 > 0`.
    UnitPaths { p1: f64 },
    /// `|p_l - 2^(1-l)| > eps_l` for some `l <= M`.
    ShortPath { length: u64, p: f64, target: f64, epsilon: f64 },
    /// `p_l > gamma_l` for some `l >= M`.
    LongPath { length: u64, p: f64, gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityReport {
    pub normal: bool,
    pub cutoff: u64,
    /// All violated conditions; the first is the earliest by clause then length.
    pub violations: Vec<Violation>,
}

impl NormalityReport {
    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

pub fn is_delta_normal(lengths: &LengthMultiset, params: &NormalityParams) -> NormalityReport {
    let m = lengths.m() as f64;
    let mut violations = Vec::new();
    let p1 = lengths.multiplicity(1) as f64 / m;
    if p1 > 0.0 {
        violations.push(Violation::UnitPaths { p1 });
    }
    let big_m = params.cutoff;
    for l in 2..=big_m {
        let p = lengths.multiplicity(l) as f64 / m;
        let target = 0.5f64.powi((l - 1).min(i32::MAX as u64) as i32);
        let dev = (p - target).abs();
        if dev > 0.0 && dev.ln() > params.ln_epsilon(l) {
            violations.push(Violation::ShortPath { length: l, p, target, epsilon: params.epsilon(l) });
        }
    }
    for (&l, &c) in lengths.counts() {
        if l < big_m.max(2) {
            continue;
        }
        let p = c as f64 / m;
        if p.ln() > params.ln_gamma(l) {
            violations.push(Violation::LongPath { length: l, p, gamma: params.gamma(l) });
        }
    }
    NormalityReport { normal: violations.is_empty(), cutoff: big_m, violations }
}
