//! Numeric abstraction shared by every algorithm.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Num, Signed, ToPrimitive, Zero};
use std::fmt::{Debug, Display};
use std::str::FromStr;

/// Capacity / flow value type.
///
/// Exact types compare without tolerance; `f64` uses `tol()` for all
/// comparisons done through the helper methods.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    const EXACT: bool;

    fn tol() -> Self;
    fn to_f64(&self) -> f64;
    /// Exact for rationals (binary expansion of the float), identity for f64.
    fn from_f64(x: f64) -> Self;
    fn from_frac(n: i64, d: i64) -> Self;
    fn to_big_rational(&self) -> BigRational;
    fn ceil(&self) -> Self;
    fn floor(&self) -> Self;
    fn parse_scalar(s: &str) -> Option<Self>;

    fn from_int(n: i64) -> Self {
        Self::from_frac(n, 1)
    }
    fn from_count(n: usize) -> Self {
        Self::from_frac(n as i64, 1)
    }
    fn is_integral(&self) -> bool {
        let f = self.floor();
        let d = self.clone() - f;
        d <= Self::tol()
    }
    /// Integer value when integral and small enough to fit.
    fn to_i64_exact(&self) -> Option<i64> {
        if !self.is_integral() {
            return None;
        }
        let r = self.to_big_rational().round();
        r.to_integer().to_i64()
    }
    fn approx_le(&self, other: &Self) -> bool {
        *self <= other.clone() + Self::tol()
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= Self::tol()
    }
    fn is_pos(&self) -> bool {
        *self > Self::tol()
    }
    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((a, b)) = s.split_once('/') {
        let n = BigInt::from_str(a.trim()).ok()?;
        let d = BigInt::from_str(b.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(n);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn tol() -> Self {
        Self::zero()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(Self::zero)
    }
    fn from_frac(n: i64, d: i64) -> Self {
        BigRational::new(n.into(), d.into())
    }
    fn to_big_rational(&self) -> BigRational {
        self.clone()
    }
    fn ceil(&self) -> Self {
        num_rational::Ratio::ceil(self)
    }
    fn floor(&self) -> Self {
        num_rational::Ratio::floor(self)
    }
    fn parse_scalar(s: &str) -> Option<Self> {
        parse_rational(s)
    }
}

impl Scalar for Rational64 {
    const EXACT: bool = true;
    fn tol() -> Self {
        Self::zero()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_f64(x: f64) -> Self {
        Rational64::approximate_float(x).unwrap_or_else(Self::zero)
    }
    fn from_frac(n: i64, d: i64) -> Self {
        Rational64::new(n, d)
    }
    fn to_big_rational(&self) -> BigRational {
        BigRational::new((*self.numer()).into(), (*self.denom()).into())
    }
    fn ceil(&self) -> Self {
        num_rational::Ratio::ceil(self)
    }
    fn floor(&self) -> Self {
        num_rational::Ratio::floor(self)
    }
    fn parse_scalar(s: &str) -> Option<Self> {
        let r = parse_rational(s)?;
        Some(Rational64::new(r.numer().to_i64()?, r.denom().to_i64()?))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn tol() -> Self {
        1e-9
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_frac(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn to_big_rational(&self) -> BigRational {
        BigRational::from_float(*self).unwrap_or_else(BigRational::zero)
    }
    fn ceil(&self) -> Self {
        f64::ceil(*self - 1e-9)
    }
    fn floor(&self) -> Self {
        f64::floor(*self + 1e-9)
    }
    fn parse_scalar(s: &str) -> Option<Self> {
        parse_rational(s).and_then(|r| ToPrimitive::to_f64(&r))
    }
}

/// Convert between scalar types through exact rationals.
pub fn convert<A: Scalar, B: Scalar>(a: &A) -> B {
    if B::EXACT {
        let r = a.to_big_rational();
        let n = r.numer().to_i64();
        let d = r.denom().to_i64();
        match (n, d) {
            (Some(n), Some(d)) => B::from_frac(n, d),
            _ => B::from_f64(a.to_f64()),
        }
    } else {
        B::from_f64(a.to_f64())
    }
}

/// Ceiling of an exact rational as an integer.
pub fn ceil_to_i64<S: Scalar>(x: &S) -> Option<i64> {
    let r = x.to_big_rational();
    num_rational::Ratio::ceil(&r).to_integer().to_i64()
}
