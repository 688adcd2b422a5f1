//! Order-preserving `{name: [string, ...]}` JSON documents.
//!
//! Taxonomy and seed files share this shape. Key order is significant and
//! duplicate keys are rejected rather than silently merged.

use std::fmt;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct OrderedLists(pub Vec<(String, Vec<String>)>);

impl<'de> Deserialize<'de> for OrderedLists {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ListsVisitor;

        impl<'de> Visitor<'de> for ListsVisitor {
            type Value = OrderedLists;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping names to arrays of strings")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut entries: Vec<(String, Vec<String>)> = Vec::new();
                while let Some((key, values)) = map.next_entry::<String, Vec<String>>()? {
                    if entries.iter().any(|(k, _)| *k == key) {
                        return Err(de::Error::custom(format!("duplicate key {key:?}")));
                    }
                    entries.push((key, values));
                }
                Ok(OrderedLists(entries))
            }
        }

        deserializer.deserialize_map(ListsVisitor)
    }
}

pub(crate) fn parse_ordered_lists(json: &str, context: &str) -> Result<Vec<(String, Vec<String>)>> {
    serde_json::from_str::<OrderedLists>(json)
        .map(|l| l.0)
        .map_err(|source| Error::Json {
            context: context.to_string(),
            source,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_order() {
        let got = parse_ordered_lists(r#"{"z": ["a"], "a": ["b", "c"]}"#, "t").unwrap();
        assert_eq!(got[0].0, "z");
        assert_eq!(got[1], ("a".to_string(), vec!["b".to_string(), "c".to_string()]));
    }

    #[test]
    fn rejects_duplicates() {
        let err = parse_ordered_lists(r#"{"a": [], "a": ["x"]}"#, "t").unwrap_err();
        assert!(err.to_string().contains("duplicate key"));
    }
}
