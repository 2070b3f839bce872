//! Lossless JSON encodings for exact numbers.
//!
//! Big integers are decimal strings; rationals are `{"num": "...", "den": "..."}`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: String,
    den: String,
}

pub fn rational_to_value(r: &BigRational) -> serde_json::Value {
    serde_json::json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let repr = RationalRepr::deserialize(d)?;
        let num: BigInt = repr.num.parse().map_err(serde::de::Error::custom)?;
        let den: BigInt = repr.den.parse().map_err(serde::de::Error::custom)?;
        if den == BigInt::from(0) {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(BigRational::new(num, den))
    }
}

pub mod opt_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => super::rational::serialize(r, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let repr = Option::<RationalRepr>::deserialize(d)?;
        repr.map(|r| {
            let num: BigInt = r.num.parse().map_err(serde::de::Error::custom)?;
            let den: BigInt = r.den.parse().map_err(serde::de::Error::custom)?;
            Ok(BigRational::new(num, den))
        })
        .transpose()
    }
}

pub mod biguint {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}
