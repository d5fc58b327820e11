use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use super::{AliceConfig, GhStrategy, Matching};
use crate::error::{invalid, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AliceEntry {
    tap: u32,
    #[serde(rename = "match", default)]
    matching: Vec<[u32; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BobEntry {
    #[serde(rename = "match", default)]
    matching: Vec<[u32; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyIn {
    pipes: u32,
    alice: BTreeMap<String, AliceEntry>,
    bob: BTreeMap<String, BobEntry>,
}

/// Numeric-order map keyed by the decimal input value.
struct Indexed<'a, T>(&'a [T]);

impl<T: Serialize> Serialize for Indexed<'_, T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (i, v) in self.0.iter().enumerate() {
            map.serialize_entry(&i.to_string(), v)?;
        }
        map.end()
    }
}

fn one_based(m: &Matching) -> Vec<[u32; 2]> {
    m.pairs().into_iter().map(|(a, b)| [a + 1, b + 1]).collect()
}

fn zero_based(pipes: u32, pairs: &[[u32; 2]]) -> Result<Matching> {
    let mut out = Vec::with_capacity(pairs.len());
    for &[a, b] in pairs {
        if a == 0 || b == 0 {
            return Err(invalid("pipes are numbered from 1"));
        }
        out.push((a - 1, b - 1));
    }
    Matching::from_pairs(pipes, &out)
}

fn dense<T>(map: BTreeMap<String, T>, who: &str) -> Result<Vec<T>> {
    let mut indexed: Vec<(u64, T)> = map
        .into_iter()
        .map(|(k, v)| {
            k.parse::<u64>().map(|i| (i, v)).map_err(|_| invalid(format!("{who} key {k:?} is not an input value")))
        })
        .collect::<Result<_>>()?;
    indexed.sort_by_key(|(i, _)| *i);
    if indexed.iter().enumerate().any(|(pos, (i, _))| *i != pos as u64) {
        return Err(invalid(format!("{who} inputs must be exactly 0..2^n")));
    }
    Ok(indexed.into_iter().map(|(_, v)| v).collect())
}

impl GhStrategy {
    /// `{"pipes": m, "alice": {x: {"tap": i, "match": [[i, j], ...]}}, "bob": {y: {"match": [[i, j], ...]}}}`
    pub fn to_json_value(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out<'a> {
            pipes: u32,
            alice: Indexed<'a, AliceEntry>,
            bob: Indexed<'a, BobEntry>,
        }
        let alice: Vec<AliceEntry> =
            self.alice.iter().map(|a| AliceEntry { tap: a.tap + 1, matching: one_based(&a.matching) }).collect();
        let bob: Vec<BobEntry> = self.bob.iter().map(|b| BobEntry { matching: one_based(b) }).collect();
        serde_json::to_value(Out { pipes: self.pipes, alice: Indexed(&alice), bob: Indexed(&bob) })
            .expect("strategy serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let raw: StrategyIn = serde_json::from_value(value)?;
        Self::from_raw(raw)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StrategyIn = serde_json::from_str(text)?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: StrategyIn) -> Result<Self> {
        let pipes = raw.pipes;
        if pipes == 0 || pipes > 1 << 12 {
            return Err(invalid(format!("pipe count {pipes} out of range")));
        }
        let alice = dense(raw.alice, "alice")?
            .into_iter()
            .map(|a| {
                if a.tap == 0 || a.tap > pipes {
                    return Err(invalid(format!("tap pipe {} outside 1..={pipes}", a.tap)));
                }
                Ok(AliceConfig { tap: a.tap - 1, matching: zero_based(pipes, &a.matching)? })
            })
            .collect::<Result<_>>()?;
        let bob = dense(raw.bob, "bob")?.into_iter().map(|b| zero_based(pipes, &b.matching)).collect::<Result<_>>()?;
        GhStrategy::new(pipes, alice, bob)
    }
}

#[cfg(test)]
mod tests {
    use super::super::library;
    use super::*;

    #[test]
    fn round_trip_and_format() {
        let s = library::and1();
        let text = s.to_json();
        assert_eq!(
            text,
            r#"{"pipes":3,"alice":{"0":{"tap":2,"match":[]},"1":{"tap":1,"match":[]}},"bob":{"0":{"match":[[1,2]]},"1":{"match":[[2,3]]}}}"#
        );
        assert_eq!(GhStrategy::from_json(&text).unwrap(), s);
    }

    #[test]
    fn rejects_gaps_and_zero_pipes() {
        let gap = r#"{"pipes":2,"alice":{"0":{"tap":1},"2":{"tap":1}},"bob":{"0":{}}}"#;
        assert!(GhStrategy::from_json(gap).is_err());
        let zero = r#"{"pipes":2,"alice":{"0":{"tap":0}},"bob":{"0":{}}}"#;
        assert!(GhStrategy::from_json(zero).is_err());
        let tap_hosed = r#"{"pipes":2,"alice":{"0":{"tap":1,"match":[[1,2]]}},"bob":{"0":{}}}"#;
        assert!(GhStrategy::from_json(tap_hosed).is_err());
    }
}
