//! JSON encodings for exact scalars.
//!
//! Integers are written as JSON numbers when they fit in an `i64` and as
//! decimal strings otherwise; rationals are always strings, `"p/q"` or `"p"`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct IntVisitor;
        impl Visitor<'_> for IntVisitor {
            type Value = JsonInt;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a decimal integer string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<JsonInt, E> {
                Ok(JsonInt(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<JsonInt, E> {
                Ok(JsonInt(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<JsonInt, E> {
                BigInt::from_str(v.trim()).map(JsonInt).map_err(E::custom)
            }
        }
        d.deserialize_any(IntVisitor)
    }
}

pub fn ints_to_json(v: &[BigInt]) -> Vec<JsonInt> {
    v.iter().cloned().map(JsonInt).collect()
}

pub fn ints_from_json(v: Vec<JsonInt>) -> Vec<BigInt> {
    v.into_iter().map(|x| x.0).collect()
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(p, q))
        }
        None => BigInt::from_str(s)
            .map(BigRational::from_integer)
            .map_err(|_| bad()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonRat(pub BigRational);

impl Serialize for JsonRat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for JsonRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map(JsonRat).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_integers_fall_back_to_strings() {
        let small = serde_json::to_string(&JsonInt(BigInt::from(-7))).unwrap();
        assert_eq!(small, "-7");
        let huge: BigInt = BigInt::from(i64::MAX) * 10;
        let enc = serde_json::to_string(&JsonInt(huge.clone())).unwrap();
        assert_eq!(enc, format!("\"{huge}\""));
        let back: JsonInt = serde_json::from_str(&enc).unwrap();
        assert_eq!(back.0, huge);
    }

    #[test]
    fn rationals_use_slash_strings() {
        let q = BigRational::new(BigInt::from(-3), BigInt::from(20));
        assert_eq!(serde_json::to_string(&JsonRat(q.clone())).unwrap(), "\"-3/20\"");
        assert_eq!(parse_rational("-3/20").unwrap(), q);
        assert_eq!(parse_rational("5").unwrap(), BigRational::from_integer(5.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
