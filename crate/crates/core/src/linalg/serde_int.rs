//! JSON encoding of exact integers as plain (arbitrary precision) numbers, and
//! of matrices as nested arrays of such numbers.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Number;

use super::IntMatrix;

fn to_number<E: serde::ser::Error>(v: &BigInt) -> Result<Number, E> {
    Number::from_str(&v.to_string()).map_err(E::custom)
}

fn from_number<E: serde::de::Error>(n: &Number) -> Result<BigInt, E> {
    BigInt::from_str(&n.to_string())
        .map_err(|_| E::custom(format!("expected an integer, found `{n}`")))
}

pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    to_number(v)?.serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    from_number(&Number::deserialize(d)?)
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(to_number)
            .collect::<Result<Vec<_>, _>>()?
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Number>::deserialize(d)?
            .iter()
            .map(from_number)
            .collect()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows = (0..self.rows())
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(to_number)
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<Number>>::deserialize(d)?;
        let rows = rows
            .iter()
            .map(|r| r.iter().map(from_number).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, D::Error>>()?;
        IntMatrix::from_big_rows(rows).map_err(D::Error::custom)
    }
}
