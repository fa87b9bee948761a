//! Arbitrary precision rationals and their textual forms.
//!
//! Rationals travel through JSON as strings `"p/q"` (or `"p"` for integers).
//! Plain JSON numbers are accepted on input and converted exactly: every finite
//! `f64` is a dyadic rational.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i32) -> Rat {
    let p = BigInt::one() << k.unsigned_abs() as usize;
    if k >= 0 {
        Rat::from_integer(p)
    } else {
        Rat::new(BigInt::one(), p)
    }
}

pub fn pow(base: &Rat, exp: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact conversion of a finite float.
pub fn from_f64(x: f64) -> Result<Rat> {
    Rat::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite value {x}")))
}

pub fn floor_int(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_int(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

/// Best rational approximation with denominator at most `max_den`, by
/// continued fractions.
pub fn approximate(x: f64, max_den: u64) -> Result<Rat> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite value {x}")));
    }
    let exact = from_f64(x)?;
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = exact.clone();
    let max_den = BigInt::from(max_den);
    loop {
        let a = floor_int(&rest);
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > max_den {
            break;
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac_part = &rest - Rat::from_integer(a);
        if frac_part.is_zero() {
            break;
        }
        rest = frac_part.recip();
    }
    if k1.is_zero() {
        return Ok(exact);
    }
    Ok(Rat::new(h1, k1))
}

/// Parses `"p/q"`, integers, and decimal literals such as `"-1.25e-3"`.
pub fn parse(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (digits, scale) = match mantissa.split_once('.') {
        Some((whole, fraction)) => (format!("{whole}{fraction}"), fraction.len() as i32),
        None => (mantissa.to_string(), 0),
    };
    let digits: BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exponent - scale;
    let ten = BigInt::from(10);
    let value = if shift >= 0 {
        Rat::from_integer(digits * num_traits::pow(ten, shift as usize))
    } else {
        Rat::new(digits, num_traits::pow(ten, (-shift) as usize))
    };
    Ok(value)
}

pub fn format(x: &Rat) -> String {
    x.to_string()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Text(String),
    Number(f64),
}

impl RatRepr {
    fn into_rat(self) -> Result<Rat> {
        match self {
            RatRepr::Text(s) => parse(&s),
            RatRepr::Number(x) => from_f64(x),
        }
    }
}

/// Serde adapter for a single [`Rat`].
pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        RatRepr::deserialize(d)?
            .into_rat()
            .map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rat>`.
pub mod serde_rat_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rat>, D::Error> {
        Vec::<RatRepr>::deserialize(d)?
            .into_iter()
            .map(|r| r.into_rat().map_err(serde::de::Error::custom))
            .collect()
    }
}
