//! Exact rational scalars and their JSON encoding.
//!
//! Every scalar in the crate is a [`Rational`]: an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator. On the wire a
//! rational is the pair `[numerator, denominator]`; components that overflow
//! `i64` are written as decimal strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn sign_rat(sign: i8) -> Rational {
    if sign < 0 {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// `1 / 2^k`.
pub fn half_pow(k: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2u8).pow(k as u32))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn int_to_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(small) => Value::from(small),
        None => Value::from(v.to_string()),
    }
}

fn int_from_json(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| format!("non-integer number {n}")),
        Value::String(s) => s.parse().map_err(|_| format!("bad integer string {s:?}")),
        other => Err(format!("expected integer, found {other}")),
    }
}

pub fn to_json(r: &Rational) -> Value {
    Value::Array(vec![int_to_json(r.numer()), int_to_json(r.denom())])
}

/// Accepts `[num, den]`, a bare integer, or a string such as `"-3/4"`.
pub fn from_json(v: &Value) -> Result<Rational, String> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            let num = int_from_json(&pair[0])?;
            let den = int_from_json(&pair[1])?;
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(Rational::new(num, den))
        }
        Value::Number(_) => Ok(Rational::from_integer(int_from_json(v)?)),
        Value::String(s) => parse(s),
        other => Err(format!("expected rational, found {other}")),
    }
}

/// Parses `"p"` or `"p/q"`.
pub fn parse(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad rational {s:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("bad rational {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rational::new(num, den))
}

/// `p` for integers, `p/q` otherwise.
pub fn display(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

/// `#[serde(with = "crate::rational::pair")]` for `[num, den]` fields.
pub mod pair {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        to_json(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = Value::deserialize(d)?;
        from_json(&v).map_err(D::Error::custom)
    }
}

/// Same as [`pair`] for optional fields.
pub mod opt_pair {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        r.as_ref().map(to_json).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let v = Option::<Value>::deserialize(d)?;
        v.map(|v| from_json(&v).map_err(D::Error::custom)).transpose()
    }
}
