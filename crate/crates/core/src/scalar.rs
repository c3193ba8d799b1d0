//! Scalar fields used by the two pipelines.
//!
//! Every geometric object is generic over [`Scalar`]. The exact pipeline runs
//! on [`Rational`] (arbitrary precision), the floating pipeline on `f64`. The
//! two are never mixed implicitly: converting between them goes through
//! [`Scalar::to_f64`] or [`rational_from_f64`], and callers do it on purpose.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub type Rational = BigRational;

/// Relative tolerance for floating predicates (incidence, feasibility).
pub const FLOAT_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Exact,
    Float,
}

impl Display for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Pipeline::Exact => f.write_str("exact"),
            Pipeline::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar: Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static {
    const PIPELINE: Pipeline;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64(&self) -> f64;

    /// The exact value of a finite double in this field (dyadic for rationals).
    fn from_f64_exact(x: f64) -> Self;

    /// Zero test: exact for rationals, `|x| <= FLOAT_EPS * max(1, scale)` for floats.
    fn is_negligible(&self, scale: f64) -> bool;

    /// Strict positivity that survives roundoff: `x > FLOAT_EPS * max(1, scale)` for floats.
    fn is_clearly_positive(&self, scale: f64) -> bool {
        self.is_positive() && !self.is_negligible(scale)
    }

    /// The nearest value to an exact rational.
    fn from_rational(r: &Rational) -> Self;

    /// Exact rational value: the identity for rationals; for floats a small-denominator
    /// continued-fraction approximation accepted only if it agrees to 1e-12 relative.
    fn as_rational(&self) -> Option<Rational>;

    /// JSON form: a number for floats, a `"p/q"` string for rationals.
    fn to_json(&self) -> serde_json::Value;

    fn max_abs(values: &[Self]) -> f64 {
        values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }
}

impl Scalar for f64 {
    const PIPELINE: Pipeline = Pipeline::Float;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64_exact(x: f64) -> Self {
        x
    }

    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= FLOAT_EPS * scale.max(1.0)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::from(*self)
    }

    fn from_rational(r: &Rational) -> Self {
        Scalar::to_f64(r)
    }

    fn as_rational(&self) -> Option<Rational> {
        let r = rationalize(*self, 1_000_000)?;
        let err = (Scalar::to_f64(&r) - self).abs();
        (err <= 1e-12 * self.abs().max(1.0)).then_some(r)
    }
}

impl Scalar for Rational {
    const PIPELINE: Pipeline = Pipeline::Exact;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Very large numerators/denominators: divide in floating point after shifting.
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    fn from_f64_exact(x: f64) -> Self {
        Rational::from_f64(x).expect("finite double")
    }

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(rational_to_string(self))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

/// `a == b` exactly for rationals, within `FLOAT_EPS * max(1, scale)` for floats.
pub fn near<S: Scalar>(a: &S, b: &S, scale: f64) -> bool {
    (a.clone() - b.clone()).is_negligible(scale)
}

pub fn factorial<S: Scalar>(n: usize) -> S {
    (1..=n as i64).fold(S::one(), |acc, k| acc * S::from_int(k))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{0}` as a rational number")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.125"` or
/// `"2.5e-3"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let t = text.trim();
    let err = || ParseRationalError(text.to_string());
    if let Some((mantissa, exponent)) = t.split_once(['e', 'E']) {
        let m = parse_rational(mantissa).map_err(|_| err())?;
        if mantissa.contains('/') {
            return Err(err());
        }
        let e: i32 = exponent.parse().map_err(|_| err())?;
        if e.unsigned_abs() > 4000 {
            return Err(err());
        }
        let p = Rational::from_integer(num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize));
        return Ok(if e >= 0 { m * p } else { m / p });
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
        let mut n = BigInt::from_str(&digits).map_err(|_| err())?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n, d));
    }
    BigInt::from_str(t).map(Rational::from_integer).map_err(|_| err())
}

/// Exact rational value of a finite double (every finite `f64` is dyadic).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_f64(x)
}

/// Best rational approximation with denominator at most `max_den`, via continued fractions.
pub fn rationalize(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let ai = BigInt::from_f64(a)?;
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = rest - a;
        if frac.abs() < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    if k1.is_zero() {
        return None;
    }
    Some(Rational::new(h1, k1))
}

pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
