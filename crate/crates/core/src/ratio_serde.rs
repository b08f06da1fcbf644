//! Serde adapter writing `Ratio<i64>` as `"a/b"` (or `"a"` when integral).

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<i64>, D::Error> {
    let raw = String::deserialize(d)?;
    raw.parse().map_err(serde::de::Error::custom)
}
