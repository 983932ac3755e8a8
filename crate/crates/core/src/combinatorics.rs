//! Exact integer combinatorics shared by the exact-moment code.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Falling factorial `(a)_b = a (a-1) ... (a-b+1)`.
pub fn falling(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - i;
    }
    acc
}

/// Number of perfect matchings on `j` points, `M(j) = (j-1)!!`.
///
/// `M(0) = 1` and `M(j) = 0` for odd `j`.
pub fn matchings(j: u64) -> BigUint {
    if j % 2 == 1 {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    let mut i = 1;
    while i < j {
        acc *= i;
        i += 2;
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient over signed arguments with the conventions used by
/// the pattern-counting formulas: `C(a, b) = 0` for `b < 0` except
/// `C(-1, -1) = 1`, and `C(a, b) = 0` for `0 <= a < b`.
pub fn binomial_ext(a: i64, b: i64) -> BigUint {
    if a == -1 && b == -1 {
        return BigUint::one();
    }
    if b < 0 || a < 0 {
        return BigUint::zero();
    }
    binomial(a as u64, b as u64)
}

pub fn pow_u(base: u64, exp: u64) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

pub fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Best-effort conversion of an exact rational to `f64`.
pub fn to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let num = r.numer().to_f64().unwrap_or(f64::NAN);
    let den = r.denom().to_f64().unwrap_or(f64::NAN);
    num / den
}

/// Natural logarithm of a positive big integer, accurate for huge values.
pub fn ln_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// `ln(n!)` by direct summation; exact enough for the log-space ledgers.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

pub fn ln_matchings(j: u64) -> f64 {
    if j % 2 == 1 {
        return f64::NEG_INFINITY;
    }
    ln_factorial(j) - ln_factorial(j / 2) - (j / 2) as f64 * std::f64::consts::LN_2
}

/// Renders a rational as `"p/q"` (or `"p"` when integral).
pub fn rat_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}
