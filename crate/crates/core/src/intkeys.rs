//! Serde adapter for integer-keyed maps in JSON objects.
//!
//! JSON object keys are strings, and the buffering deserializer used by
//! internally tagged enums hands them over as strings, so integer-keyed
//! fields go through an explicit string conversion.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn serialize<K, V, S>(map: &BTreeMap<K, V>, serializer: S) -> Result<S::Ok, S::Error>
where
    K: Display + Ord,
    V: Serialize,
    S: Serializer,
{
    serializer.collect_map(map.iter().map(|(k, v)| (k.to_string(), v)))
}

pub fn deserialize<'de, K, V, D>(deserializer: D) -> Result<BTreeMap<K, V>, D::Error>
where
    K: FromStr + Ord,
    K::Err: Display,
    V: Deserialize<'de>,
    D: Deserializer<'de>,
{
    let raw = BTreeMap::<String, V>::deserialize(deserializer)?;
    raw.into_iter()
        .map(|(k, v)| {
            k.parse::<K>()
                .map(|k| (k, v))
                .map_err(|e| serde::de::Error::custom(format!("map key `{k}`: {e}")))
        })
        .collect()
}
