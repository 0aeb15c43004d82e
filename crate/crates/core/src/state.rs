//! Snapshots of the system under test.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::de::{self, Deserialize, Deserializer, MapAccess, Visitor};
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::value::Value;

/// Reserved key carrying the `happened` labels on the wire.
pub const HAPPENED: &str = "happened";

/// A flat map of field names (`selector.field`) to values, plus the set of
/// action/event names that produced this state.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct State {
    pub fields: BTreeMap<String, Value>,
    pub happened: Vec<String>,
}

impl State {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_field(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.fields.insert(key.into(), value.into());
        self
    }

    pub fn with_happened<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.happened = names.into_iter().map(Into::into).collect();
        self
    }
}

/// Read access to a state, as needed by expression evaluation.
///
/// Implemented by [`State`]; tests wrap it to observe which fields a
/// formula actually reads.
pub trait StateView {
    fn field(&self, key: &str) -> Option<&Value>;
    fn happened(&self) -> &[String];
}

impl StateView for State {
    fn field(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    fn happened(&self) -> &[String] {
        &self.happened
    }
}

impl<T: StateView + ?Sized> StateView for &T {
    fn field(&self, key: &str) -> Option<&Value> {
        (**self).field(key)
    }

    fn happened(&self) -> &[String] {
        (**self).happened()
    }
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.fields.len() + 1))?;
        for (k, v) in &self.fields {
            map.serialize_entry(k, v)?;
        }
        map.serialize_entry(HAPPENED, &self.happened)?;
        map.end()
    }
}

struct StateVisitor;

impl<'de> Visitor<'de> for StateVisitor {
    type Value = State;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a state object")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<State, A::Error> {
        let mut state = State::new();
        let mut saw_happened = false;
        while let Some(key) = map.next_key::<String>()? {
            if key == HAPPENED {
                if saw_happened {
                    return Err(de::Error::duplicate_field(HAPPENED));
                }
                state.happened = map.next_value()?;
                saw_happened = true;
            } else {
                let value: Value = map.next_value()?;
                if state.fields.insert(key.clone(), value).is_some() {
                    return Err(de::Error::custom(alloc::format!("duplicate field {:?}", key)));
                }
            }
        }
        Ok(state)
    }
}

impl<'de> Deserialize<'de> for State {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<State, D::Error> {
        deserializer.deserialize_map(StateVisitor)
    }
}
