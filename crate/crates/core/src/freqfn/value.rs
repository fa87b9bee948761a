//! JSON form of complex samples: a plain number for real values, `[re, im]`
//! otherwise.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum Repr {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Complex64> for Repr {
    fn from(z: Complex64) -> Self {
        if z.im == 0.0 {
            Repr::Real(z.re)
        } else {
            Repr::Pair([z.re, z.im])
        }
    }
}

impl From<Repr> for Complex64 {
    fn from(r: Repr) -> Self {
        match r {
            Repr::Real(x) => Complex64::new(x, 0.0),
            Repr::Pair([a, b]) => Complex64::new(a, b),
        }
    }
}

pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    Repr::from(*z).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    Ok(Repr::deserialize(d)?.into())
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(zs.iter().map(|z| Repr::from(*z)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<Repr>::deserialize(d)?.into_iter().map(Into::into).collect())
    }
}
