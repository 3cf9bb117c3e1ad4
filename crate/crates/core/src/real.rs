//! Exact scalars.
//!
//! Every coefficient, breakpoint and finite distance is an arbitrary-precision
//! rational. Text input accepts integers, decimals (optionally with an
//! exponent) and `p/q` fractions; all of them are parsed exactly, so `0.1`
//! is one tenth and not the nearest double.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Real = BigRational;

/// Absolute tolerance used wherever a value only exists as a double
/// (sampled analytic distances, floating-point orbits).
pub const FLOAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid number `{text}`: {reason}")]
pub struct ParseRealError {
    pub text: String,
    pub reason: &'static str,
}

pub fn int(n: i64) -> Real {
    Real::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Real {
    Real::new(BigInt::from(p), BigInt::from(q))
}

/// Exact conversion of a finite double. Non-finite input is rejected.
pub fn from_f64(x: f64) -> Option<Real> {
    if x == 0.0 {
        return Some(Real::zero());
    }
    Real::from_f64(x)
}

pub fn to_f64(x: &Real) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn parse_real(text: &str) -> Result<Real, ParseRealError> {
    let s = text.trim();
    let err = |reason| ParseRealError {
        text: text.to_string(),
        reason,
    };
    if s.is_empty() {
        return Err(err("empty"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let num = parse_decimal(p.trim()).ok_or_else(|| err("bad numerator"))?;
        let den = parse_decimal(q.trim()).ok_or_else(|| err("bad denominator"))?;
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(num / den);
    }
    parse_decimal(s).ok_or_else(|| err("not a decimal or p/q rational"))
}

fn parse_decimal(s: &str) -> Option<Real> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (whole, frac) = match mantissa.split_once('.') {
        Some((w, f)) => (w, f),
        None => (mantissa, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let mut value = Real::from_integer(digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac.len() as i32;
    let ten = Real::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if neg { -value } else { value })
}

/// Terminating decimal expansion, or `None` when the denominator has a prime
/// factor other than 2 or 5.
pub fn to_decimal_string(x: &Real) -> Option<String> {
    let mut den = x.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = x * Real::from_integer(num_traits::pow(BigInt::from(10), places));
    debug_assert!(scaled.is_integer());
    let n = scaled.to_integer();
    if places == 0 {
        return Some(n.to_string());
    }
    let neg = n.is_negative();
    let digits = n.abs().to_string();
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (w, f) = padded.split_at(padded.len() - places);
    Some(format!("{}{w}.{f}", if neg { "-" } else { "" }))
}

/// Canonical text form: decimal when it terminates, `p/q` otherwise.
pub fn format_real(x: &Real) -> String {
    to_decimal_string(x).unwrap_or_else(|| format!("{}/{}", x.numer(), x.denom()))
}

pub fn max_real<'a>(a: &'a Real, b: &'a Real) -> &'a Real {
    if a >= b {
        a
    } else {
        b
    }
}

/// Nonnegative reals extended with `+∞`; used for infima over empty sets and
/// suprema that may diverge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtReal {
    Finite(Real),
    Infinity,
}

impl ExtReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(&self) -> Option<&Real> {
        match self {
            ExtReal::Finite(r) => Some(r),
            ExtReal::Infinity => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(r) => to_f64(r),
            ExtReal::Infinity => f64::INFINITY,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.cmp(b),
            (ExtReal::Finite(_), ExtReal::Infinity) => Ordering::Less,
            (ExtReal::Infinity, ExtReal::Finite(_)) => Ordering::Greater,
            (ExtReal::Infinity, ExtReal::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(r) => f.write_str(&format_real(r)),
            ExtReal::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Serde adapter writing a [`Real`] as its canonical string and reading
/// strings, integers or floats (floats through their shortest decimal text).
pub mod serde_real {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Real, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_real(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Real, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_real(&v).map_err(serde::de::Error::custom)
    }

    pub fn value_to_real(v: &serde_json::Value) -> Result<Real, String> {
        match v {
            serde_json::Value::String(s) => parse_real(s).map_err(|e| e.to_string()),
            serde_json::Value::Number(n) => parse_real(&n.to_string()).map_err(|e| e.to_string()),
            other => Err(format!("expected a number or numeric string, found {other}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_real("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_real("-2.50").unwrap(), ratio(-5, 2));
        assert_eq!(parse_real("1e-3").unwrap(), ratio(1, 1000));
        assert_eq!(parse_real(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_real("3/6").unwrap(), ratio(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_real("").is_err());
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("abc").is_err());
        assert!(parse_real(".").is_err());
        assert!(parse_real("1.2.3").is_err());
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format_real(&ratio(1, 4)), "0.25");
        assert_eq!(format_real(&ratio(-1, 8)), "-0.125");
        assert_eq!(format_real(&ratio(1, 3)), "1/3");
        assert_eq!(format_real(&int(7)), "7");
        assert_eq!(format_real(&ratio(1, 1000)), "0.001");
    }

    #[test]
    fn ext_real_order() {
        assert!(ExtReal::Finite(int(5)) < ExtReal::Infinity);
        assert_eq!(ExtReal::Infinity.to_string(), "inf");
    }

    proptest::proptest! {
        #[test]
        fn format_parse_roundtrip(p in -10_000i64..10_000, q in 1i64..2_000) {
            let x = ratio(p, q);
            proptest::prop_assert_eq!(parse_real(&format_real(&x)).unwrap(), x);
        }
    }
}
