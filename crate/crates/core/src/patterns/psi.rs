//! The `Psi_h(m)` ledger that organises the second-moment sum by pattern class.

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;

use super::check_shape;
use crate::combinatorics::{
    binomial, binomial_ext, factorial, ln_big, ln_binomial, ln_factorial, ln_matchings, matchings, pow_u, ratio,
};
use crate::error::{Error, Result};

/// Largest `n` evaluated with exact integers; larger `n` uses logarithms.
pub const PSI_EXACT_MAX_N: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PsiValue {
    Exact(#[serde(serialize_with = "ser_big")] BigUint),
    Log(f64),
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl PsiValue {
    /// Natural logarithm of the value (`-inf` for zero).
    pub fn ln(&self) -> f64 {
        match self {
            PsiValue::Exact(v) if v.bits() == 0 => f64::NEG_INFINITY,
            PsiValue::Exact(v) => ln_big(v),
            PsiValue::Log(l) => *l,
        }
    }

    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            PsiValue::Exact(v) => Some(v),
            PsiValue::Log(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiRow {
    pub h: usize,
    pub m: usize,
    pub psi: PsiValue,
    /// `Psi_h(m) * k^(2(n/k - h))`.
    pub psi_hat: PsiValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiLedger {
    pub n: usize,
    pub k: usize,
    pub rows: Vec<PsiRow>,
}

impl PsiLedger {
    pub fn get(&self, h: usize, m: usize) -> Option<&PsiRow> {
        self.rows.iter().find(|r| r.h == h && r.m == m)
    }

    /// `m` maximising `Psi_0(m)`.
    pub fn argmax_h0(&self) -> Option<usize> {
        self.rows
            .iter()
            .filter(|r| r.h == 0)
            .max_by(|a, b| a.psi.ln().total_cmp(&b.psi.ln()))
            .map(|r| r.m)
    }

    /// CSV with columns `h,m,psi,psi_hat,ln_psi,ln_psi_hat`; exact columns
    /// are empty in log mode.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,m,psi,psi_hat,ln_psi,ln_psi_hat\n");
        for r in &self.rows {
            let ex = |v: &PsiValue| v.exact().map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{:.12e},{:.12e}\n",
                r.h,
                r.m,
                ex(&r.psi),
                ex(&r.psi_hat),
                r.psi.ln(),
                r.psi_hat.ln()
            ));
        }
        out
    }
}

/// `Psi_h(m) = M(n-2m) n! m! 2^m C(n-kh-m-1, m-1) C(n/k, h)^2 (2k)^h h!`
/// over every feasible `(h, m)`.
pub fn psi_ledger(n: usize, k: usize) -> Result<PsiLedger> {
    check_shape(n, k)?;
    if n % 2 == 1 {
        return Err(Error::invalid("n must be even"));
    }
    let slots = n / k;
    let mut rows = Vec::new();
    for h in 0..=slots {
        let free = n - k * h;
        let m_lo = if free == 0 { 0 } else { 1 };
        for m in m_lo..=free / 2 {
            let (psi, psi_hat) = psi_entry(n, k, h, m, n <= PSI_EXACT_MAX_N);
            rows.push(PsiRow { h, m, psi, psi_hat });
        }
    }
    Ok(PsiLedger { n, k, rows })
}

fn psi_entry(n: usize, k: usize, h: usize, m: usize, exact: bool) -> (PsiValue, PsiValue) {
    let slots = n / k;
    let free = n - k * h;
    let hat_exp = 2 * (slots - h) as u64;
    if exact {
        let v = matchings((n - 2 * m) as u64)
            * factorial(n as u64)
            * factorial(m as u64)
            * pow_u(2, m as u64)
            * binomial_ext(free as i64 - m as i64 - 1, m as i64 - 1)
            * binomial(slots as u64, h as u64).pow(2)
            * pow_u(2 * k as u64, h as u64)
            * factorial(h as u64);
        let hat = &v * pow_u(k as u64, hat_exp);
        (PsiValue::Exact(v), PsiValue::Exact(hat))
    } else {
        let c = if free == 0 { 0.0 } else { ln_binomial((free - m - 1) as u64, (m - 1) as u64) };
        let l = ln_matchings((n - 2 * m) as u64)
            + ln_factorial(n as u64)
            + ln_factorial(m as u64)
            + m as f64 * std::f64::consts::LN_2
            + c
            + 2.0 * ln_binomial(slots as u64, h as u64)
            + h as f64 * ((2 * k) as f64).ln()
            + ln_factorial(h as u64);
        (PsiValue::Log(l), PsiValue::Log(l + hat_exp as f64 * (k as f64).ln()))
    }
}

/// `Psi_0(m) / Psi_0(m+1) = m (n-m-1) / (2 (m+1) (n-2m))`.
pub fn psi0_ratio(n: usize, m: usize) -> BigRational {
    let (n, m) = (n as u64, m as u64);
    ratio(BigUint::from(m * (n - m - 1)), BigUint::from(2 * (m + 1) * (n - 2 * m)))
}
