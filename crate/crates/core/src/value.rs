//! Exact rational values.
//!
//! Every item value, processing time, demand and threshold in the crate is a
//! [`Value`]. Decision paths never touch floating point.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// An exact rational number.
pub type Value = BigRational;

/// `n / d` as a [`Value`]. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Value {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Value {
    BigRational::from_integer(BigInt::from(n))
}

pub fn one() -> Value {
    Value::one()
}

pub fn zero() -> Value {
    Value::zero()
}

/// Parses `"num/den"` or a bare integer `"num"`.
pub fn parse_value(s: &str) -> Result<Value, Error> {
    let bad = || Error::BadValue(s.to_string());
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Canonical `"num/den"` rendering (always with a denominator, reduced).
pub fn format_value(v: &Value) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Sum of a sequence of values.
pub fn sum<'a, I: IntoIterator<Item = &'a Value>>(values: I) -> Value {
    values.into_iter().fold(Value::zero(), |acc, v| acc + v)
}

pub fn is_positive(v: &Value) -> bool {
    v.is_positive()
}

/// Approximate float view, for human-facing tables only.
pub fn to_f64(v: &Value) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter storing a [`Value`] as a `"num/den"` string.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Value, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_value(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Value, D::Error> {
        let s = String::deserialize(d)?;
        parse_value(&s).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<Value>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.serialize_some(&format_value(v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Value>, D::Error> {
            let s = Option::<String>::deserialize(d)?;
            s.map(|s| parse_value(&s).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}
