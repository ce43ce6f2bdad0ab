//! Chern numbers of a polarized surface `(S, L)`.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact::{BigInt, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid Chern numbers {0:?}: expected four comma-separated integers ∂,k,s,x")]
pub struct ChernParseError(pub String);

/// `(∂, k, s, x) = (L², L·K, K², c₂)`. Any integer quadruple is accepted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChernNumbers {
    pub partial: BigInt,
    pub k: BigInt,
    pub s: BigInt,
    pub x: BigInt,
}

impl ChernNumbers {
    pub fn new(partial: i64, k: i64, s: i64, x: i64) -> Self {
        Self { partial: partial.into(), k: k.into(), s: s.into(), x: x.into() }
    }

    /// `(P², O(d))`: `(d², -3d, 9, 3)`.
    pub fn p2(d: i64) -> Self {
        let d = BigInt::from(d);
        Self { partial: &d * &d, k: &d * -3, s: 9.into(), x: 3.into() }
    }

    pub fn as_array(&self) -> [&BigInt; 4] {
        [&self.partial, &self.k, &self.s, &self.x]
    }

    pub fn as_rationals(&self) -> [Rational; 4] {
        self.as_array().map(|v| Rational::from_integer(v.clone()))
    }
}

impl fmt::Display for ChernNumbers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.partial, self.k, self.s, self.x)
    }
}

impl FromStr for ChernNumbers {
    type Err = ChernParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(ChernParseError(s.to_string()));
        }
        let mut v = Vec::with_capacity(4);
        for p in parts {
            v.push(p.parse::<BigInt>().map_err(|_| ChernParseError(s.to_string()))?);
        }
        let x = v.pop().unwrap();
        let s_ = v.pop().unwrap();
        let k = v.pop().unwrap();
        let partial = v.pop().unwrap();
        Ok(Self { partial, k, s: s_, x })
    }
}

impl Serialize for ChernNumbers {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = ser.serialize_map(Some(4))?;
        m.serialize_entry("d", &self.partial.to_string())?;
        m.serialize_entry("k", &self.k.to_string())?;
        m.serialize_entry("s", &self.s.to_string())?;
        m.serialize_entry("x", &self.x.to_string())?;
        m.end()
    }
}
