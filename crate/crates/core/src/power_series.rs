//! Truncated formal power series and the generating-function identities for
//! renewal sequences.
//!
//! Coefficients are exact rationals by default. The `f64` instantiation is
//! the large-order mode and must be requested explicitly through the type
//! parameter.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::combinatorics::{parse_rational, rat_string, to_f64};
use crate::error::{Error, Result};
use crate::lengths::LengthMultiset;

/// Coefficient field for [`TruncatedSeries`].
pub trait Coefficient:
    Clone + Debug + PartialEq + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn from_ratio(num: u64, den: u64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;
}

impl Coefficient for BigRational {
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        to_f64(self)
    }
    fn to_json(&self) -> Value {
        Value::String(rat_string(self))
    }
    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n.as_i64().map(|i| BigRational::from_integer(BigInt::from(i))),
            _ => None,
        }
    }
}

impl Coefficient for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self).map(Value::Number).unwrap_or(Value::Null)
    }
    fn from_json(v: &Value) -> Option<Self> {
        v.as_f64()
    }
}

/// Coefficients `c_0..=c_T` of a power series known modulo `z^(T+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Coefficient> TruncatedSeries<C> {
    /// Wraps `coeffs`; the truncation order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<C>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a truncated series needs at least one coefficient"));
        }
        Ok(TruncatedSeries { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries { coeffs: vec![C::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(order, 0, C::one())
    }

    /// `c z^power`, truncated at `order`.
    pub fn monomial(order: usize, power: usize, c: C) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// Truncation order `T`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of `z^i`; zero beyond the truncation order is not implied,
    /// so callers must stay within `order()`.
    pub fn coeff(&self, i: usize) -> &C {
        &self.coeffs[i]
    }

    pub fn truncate(&self, order: usize) -> Self {
        let t = order.min(self.order());
        TruncatedSeries { coeffs: self.coeffs[..=t].to_vec() }
    }

    pub fn scale(&self, c: &C) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    /// `f(z^2)` at the same truncation order.
    pub fn compose_square(&self) -> Self {
        let t = self.order();
        let mut out = Self::zero(t);
        for (i, c) in self.coeffs.iter().enumerate() {
            if 2 * i > t {
                break;
            }
            out.coeffs[2 * i] = c.clone();
        }
        out
    }

    /// `1 / (1 - f)` for `f` with zero constant term, by the convolution
    /// recurrence `u_j = sum_{l=1..j} f_l u_{j-l}`.
    pub fn renewal(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::invalid("renewal sequence needs a series with zero constant term"));
        }
        let t = self.order();
        let mut u: Vec<C> = Vec::with_capacity(t + 1);
        u.push(C::one());
        for j in 1..=t {
            let mut acc = C::zero();
            for l in 1..=j {
                if !self.coeffs[l].is_zero() {
                    acc = acc + self.coeffs[l].clone() * u[j - l].clone();
                }
            }
            u.push(acc);
        }
        Ok(TruncatedSeries { coeffs: u })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(C::to_json).collect())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("series JSON must be an array".into()))?;
        let coeffs = arr
            .iter()
            .map(|x| C::from_json(x).ok_or_else(|| Error::Parse(format!("bad coefficient {x}"))))
            .collect::<Result<Vec<C>>>()?;
        Self::new(coeffs)
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coeffs.iter().map(C::to_f64).collect()
    }
}

impl<C: Coefficient> Add for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn add(self, rhs: Self) -> TruncatedSeries<C> {
        let t = self.order().min(rhs.order());
        TruncatedSeries { coeffs: (0..=t).map(|i| self.coeffs[i].clone() + rhs.coeffs[i].clone()).collect() }
    }
}

impl<C: Coefficient> Sub for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn sub(self, rhs: Self) -> TruncatedSeries<C> {
        let t = self.order().min(rhs.order());
        TruncatedSeries { coeffs: (0..=t).map(|i| self.coeffs[i].clone() - rhs.coeffs[i].clone()).collect() }
    }
}

impl<C: Coefficient> Mul for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn mul(self, rhs: Self) -> TruncatedSeries<C> {
        let t = self.order().min(rhs.order());
        let mut out = vec![C::zero(); t + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(t + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(t + 1 - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        TruncatedSeries { coeffs: out }
    }
}

/// `f(z) = sum_l p_l z^l` with `p_l = m_l / m`, truncated at `order`.
pub fn series_from_lengths<C: Coefficient>(lengths: &LengthMultiset, order: usize) -> TruncatedSeries<C> {
    let mut s = TruncatedSeries::<C>::zero(order);
    for (&len, &mult) in lengths.counts() {
        if (len as usize) <= order {
            s.coeffs[len as usize] = C::from_ratio(mult, lengths.m());
        }
    }
    s
}

/// The geometric law `g(z) = z^2 / (2 - z)`, i.e. `p_l = 2^(1-l)` for `l >= 2`.
pub fn geometric_series<C: Coefficient>(order: usize) -> TruncatedSeries<C> {
    let mut s = TruncatedSeries::<C>::zero(order);
    let half = C::from_ratio(1, 2);
    let mut c = C::one();
    for l in 2..=order {
        c = c * half.clone();
        s.coeffs[l] = c.clone();
    }
    s
}

/// Coefficients of `1 / (1 - f(z))` up to `order` (capped at `f.order()`).
pub fn renewal_coefficients<C: Coefficient>(f: &TruncatedSeries<C>, order: usize) -> Result<TruncatedSeries<C>> {
    f.truncate(order).renewal()
}

/// Coefficients of `(f(z^2) - f(z)^2) / (1 - f(z))^3` up to `order`.
pub fn correction_coefficients<C: Coefficient>(f: &TruncatedSeries<C>, order: usize) -> Result<TruncatedSeries<C>> {
    let f = f.truncate(order);
    let u = f.renewal()?;
    let u3 = &(&u * &u) * &u;
    let num = &f.compose_square() - &(&f * &f);
    Ok(&num * &u3)
}

/// Exact limit constants of a length law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitConstants {
    #[serde(serialize_with = "ser_rat")]
    pub f_prime_1: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub f_double_prime_1: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub u_infinity: BigRational,
    /// `(f' - f'^2 + f'') / f'^3` evaluated at 1.
    #[serde(serialize_with = "ser_rat")]
    pub correction: BigRational,
}

pub(crate) fn ser_rat<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rat_string(r))
}

impl LimitConstants {
    /// Constants from `f'(1)` and `f''(1)`; `f'(1)` must be positive.
    pub fn from_derivatives(f1: BigRational, f2: BigRational) -> Self {
        let u_infinity = f1.recip();
        let correction = (f1.clone() - f1.clone() * f1.clone() + f2.clone()) / (f1.clone() * f1.clone() * f1.clone());
        LimitConstants { f_prime_1: f1, f_double_prime_1: f2, u_infinity, correction }
    }

    /// Constants of the geometric law `z^2/(2-z)`: `f'(1) = 3`, `f''(1) = 8`.
    pub fn geometric() -> Self {
        Self::from_derivatives(BigRational::from_integer(3.into()), BigRational::from_integer(8.into()))
    }
}

/// Exact `f'(1) = n/m`, `f''(1) = sum l(l-1) p_l`, `u_inf` and `c_f` of a multiset.
pub fn limit_constants(lengths: &LengthMultiset) -> LimitConstants {
    let m = BigInt::from(lengths.m());
    let f1 = BigRational::new(BigInt::from(lengths.n()), m.clone());
    let mut s2 = BigInt::zero();
    for (&len, &mult) in lengths.counts() {
        s2 += BigInt::from(len) * BigInt::from(len - 1) * BigInt::from(mult);
    }
    LimitConstants::from_derivatives(f1, BigRational::new(s2, m))
}

/// Least-squares slope of `ln |u_j - target|` against `j` over `lo..=hi`.
///
/// Indices where the difference is exactly zero are skipped. Returns `None`
/// when fewer than two points remain.
pub fn decay_slope(values: &[f64], target: f64, lo: usize, hi: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = (lo..=hi.min(values.len().saturating_sub(1)))
        .filter_map(|j| {
            let d = (values[j] - target).abs();
            (d > 0.0).then(|| (j as f64, d.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}
