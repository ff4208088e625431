//! Scalar backends.
//!
//! Every geometric computation is generic over [`Scalar`], implemented by the
//! exact [`Rational`] backend and by `f64`. The two are never mixed inside a
//! single computation; conversion goes through [`Scalar::to_f64`] explicitly.
//!
//! Float comparisons against zero always take a tolerance. The exact backend
//! ignores the tolerance and tests for exact zero.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, the exact backend.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// True for backends where arithmetic is exact and zero tests are decidable.
    const EXACT: bool;
    const NAME: &'static str;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact backends convert the binary64 value exactly.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Zero test. `tol` is an absolute threshold on the float backend and is
    /// ignored by exact backends.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Square root inside the backend, if one exists there.
    fn sqrt_exact(&self) -> Option<Self>;

    /// Rescale a projective representative in place: exact backends clear
    /// denominators and divide out the content (positive factor), the float
    /// backend scales to unit Euclidean norm. The sign is preserved.
    fn normalize_projective(v: &mut [Self]);

    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    fn abs_value(&self) -> Self {
        if self.to_f64() < 0.0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    /// `sum_k c_k x_k y_k z_k w_k`. Exact backends reduce once at the end
    /// instead of after every operation.
    fn sum_of_products<'a>(terms: impl Iterator<Item = (&'a Self, [&'a Self; 4])>) -> Self
    where
        Self: 'a,
    {
        terms.fold(Self::zero(), |acc, (c, [x, y, z, w])| {
            acc + c.clone() * x.clone() * y.clone() * z.clone() * w.clone()
        })
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const NAME: &'static str = "exact";

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).unwrap_or_else(Rational::zero)
    }

    fn to_f64(&self) -> f64 {
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            // Huge numerators or denominators: shift both down first.
            _ => {
                let bits = self.numer().bits().max(self.denom().bits());
                let shift = bits.saturating_sub(900) as usize;
                let n = (self.numer() >> shift).to_f64().unwrap_or(0.0);
                let d = (self.denom() >> shift).to_f64().unwrap_or(1.0);
                n / d
            }
        }
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn sum_of_products<'a>(terms: impl Iterator<Item = (&'a Self, [&'a Self; 4])>) -> Self {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (c, f) in terms {
            let n = f.iter().fold(c.numer().clone(), |acc, x| acc * x.numer());
            let d = f.iter().fold(c.denom().clone(), |acc, x| acc * x.denom());
            if d == den {
                num += n;
            } else {
                num = num * &d + n * &den;
                den *= d;
            }
        }
        Rational::new(num, den)
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(Rational::new(n, d))
        } else {
            None
        }
    }

    fn normalize_projective(v: &mut [Self]) {
        let mut lcm = BigInt::one();
        for x in v.iter() {
            lcm = lcm.lcm(x.denom());
        }
        let mut gcd = BigInt::zero();
        for x in v.iter() {
            let scaled = x.numer() * (&lcm / x.denom());
            gcd = gcd.gcd(&scaled);
        }
        if gcd.is_zero() {
            return;
        }
        for x in v.iter_mut() {
            let scaled = x.numer() * (&lcm / x.denom());
            *x = Rational::from_integer(scaled / &gcd);
        }
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rational::from_i64(i))
                } else if let Some(f) = n.as_f64() {
                    Rational::from_float(f).ok_or_else(|| Error::Parse(format!("bad number {f}")))
                } else {
                    Err(Error::Parse(format!("bad number {n}")))
                }
            }
            other => Err(Error::Parse(format!("expected rational, got {other}"))),
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(self.sqrt())
        }
    }

    fn normalize_projective(v: &mut [Self]) {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in v.iter_mut() {
                *x /= norm;
            }
        }
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("bad number {n}"))),
            Value::String(s) => Ok(Scalar::to_f64(&parse_rational(s)?)),
            other => Err(Error::Parse(format!("expected number, got {other}"))),
        }
    }
}

/// Parse `"p/q"`, `"p"` or a decimal literal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    // decimal: split at the point so the value is exact
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').ok_or_else(bad)?;
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let q = Rational::new(digits, den);
    Ok(if neg { -q } else { q })
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn norm_f64<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
}

pub fn rationals(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_i64(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), Rational::from_ratio(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), Rational::from_i64(-7));
        assert_eq!(
            parse_rational("-0.25").unwrap(),
            Rational::from_ratio(-1, 4)
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(
            Rational::from_ratio(9, 4).sqrt_exact(),
            Some(Rational::from_ratio(3, 2))
        );
        assert_eq!(Rational::from_i64(2).sqrt_exact(), None);
        assert_eq!(Rational::from_i64(-4).sqrt_exact(), None);
    }

    #[test]
    fn normalize_clears_denominators_and_keeps_sign() {
        let mut v = vec![
            Rational::from_ratio(-1, 2),
            Rational::zero(),
            Rational::from_ratio(3, 4),
        ];
        Rational::normalize_projective(&mut v);
        assert_eq!(v, rationals(&[-2, 0, 3]));
    }

    #[test]
    fn json_round_trip() {
        let q = Rational::from_ratio(-5, 3);
        assert_eq!(Rational::from_json(&q.to_json()).unwrap(), q);
        assert_eq!(q.to_json(), Value::String("-5/3".into()));
        assert_eq!(f64::from_json(&Value::String("1/4".into())).unwrap(), 0.25);
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let q = Rational::new(&big * BigInt::from(3), big);
        assert!((Scalar::to_f64(&q) - 3.0).abs() < 1e-12);
    }
}
