use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Expr;
use crate::speclang::compile_expr;
use crate::value::Value;

/// Built-in action that every model accepts and that changes nothing.
pub const NOOP: &str = "noop";

/// A model file as written, with expressions still as source text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ModelDocument {
    pub state: BTreeMap<String, Value>,
    #[serde(default)]
    pub actions: BTreeMap<String, ActionDocument>,
    #[serde(default)]
    pub events: Vec<EventDocument>,
    #[serde(default)]
    pub loaded_delay: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<String>,
    #[serde(default)]
    pub effects: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDocument {
    pub id: String,
    /// Selector the event reports as changed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enabled: Option<String>,
    pub schedule: Schedule,
    #[serde(default)]
    pub effects: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Schedule {
    /// Every `n` ms, starting `n` ms after the page has loaded.
    Periodic(u64),
    /// `delay` ms after each performance of the action `trigger`.
    AfterAction { delay: u64, trigger: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}: {reason}")]
pub struct ModelError {
    /// Location in the document, e.g. `/actions/click#toggle/guard`.
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelAction {
    pub guard: Option<Expr>,
    pub effects: Vec<(String, Expr)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelEvent {
    pub id: String,
    pub subject: Option<String>,
    pub enabled: Option<Expr>,
    pub schedule: Schedule,
    pub effects: Vec<(String, Expr)>,
}

/// A validated guarded-command transition system.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub initial: BTreeMap<String, Value>,
    /// Keyed by primitive id followed by its string arguments, e.g.
    /// `click#toggle`.
    pub actions: BTreeMap<String, ModelAction>,
    pub events: Vec<ModelEvent>,
    pub loaded_delay: u64,
}

struct Validator<'a> {
    fields: &'a BTreeMap<String, Value>,
}

impl Validator<'_> {
    fn expr(&self, path: &str, src: &str) -> Result<Expr, ModelError> {
        let e = compile_expr(src).map_err(|e| ModelError { path: path.to_string(), reason: e.to_string() })?;
        let mut bad = None;
        e.walk(&mut |sub| {
            if bad.is_none() {
                bad = match sub {
                    Expr::Happened => Some("`happened` is not available in models".to_string()),
                    Expr::Field(f) if !self.fields.contains_key(f) => Some(format!("undeclared field `{}`", f)),
                    _ => None,
                };
            }
        });
        match bad {
            Some(reason) => Err(ModelError { path: path.to_string(), reason }),
            None => Ok(e),
        }
    }

    fn effects(&self, path: &str, effects: &BTreeMap<String, String>) -> Result<Vec<(String, Expr)>, ModelError> {
        effects
            .iter()
            .map(|(field, src)| {
                let at = format!("{}/effects/{}", path, field);
                if !self.fields.contains_key(field) {
                    return Err(ModelError { path: at, reason: format!("effect writes undeclared field `{}`", field) });
                }
                Ok((field.clone(), self.expr(&at, src)?))
            })
            .collect()
    }
}

impl Model {
    pub fn from_document(doc: &ModelDocument) -> Result<Model, ModelError> {
        let v = Validator { fields: &doc.state };
        let err = |path: String, reason: &str| ModelError { path, reason: reason.to_string() };
        for key in doc.state.keys() {
            if key == crate::state::HAPPENED {
                return Err(err(format!("/state/{}", key), "reserved field name"));
            }
        }

        let mut actions = BTreeMap::new();
        for (key, a) in &doc.actions {
            let path = format!("/actions/{}", key);
            if key.is_empty() {
                return Err(err(path, "action key must not be empty"));
            }
            let guard = match &a.guard {
                Some(g) => Some(v.expr(&format!("{}/guard", path), g)?),
                None => None,
            };
            actions.insert(key.clone(), ModelAction { guard, effects: v.effects(&path, &a.effects)? });
        }

        let mut events = Vec::new();
        let mut ids = BTreeSet::new();
        for (i, e) in doc.events.iter().enumerate() {
            let path = format!("/events/{}", i);
            if e.id.is_empty() || e.id == super::LOADED {
                return Err(err(format!("{}/id", path), "event id must be non-empty and not `loaded`"));
            }
            if !ids.insert(e.id.as_str()) {
                return Err(err(format!("{}/id", path), "duplicate event id"));
            }
            if let Some(subject) = &e.subject {
                let prefix = format!("{}.", subject);
                if !doc.state.keys().any(|k| k.starts_with(&prefix)) {
                    return Err(err(format!("{}/subject", path), "subject has no declared fields"));
                }
            }
            match &e.schedule {
                Schedule::Periodic(0) => return Err(err(format!("{}/schedule", path), "period must be positive")),
                Schedule::AfterAction { trigger, .. } if trigger != NOOP && !doc.actions.contains_key(trigger) => {
                    return Err(err(format!("{}/schedule/afterAction/trigger", path), "unknown action"))
                }
                _ => {}
            }
            let enabled = match &e.enabled {
                Some(src) => Some(v.expr(&format!("{}/enabled", path), src)?),
                None => None,
            };
            events.push(ModelEvent {
                id: e.id.clone(),
                subject: e.subject.clone(),
                enabled,
                schedule: e.schedule.clone(),
                effects: v.effects(&path, &e.effects)?,
            });
        }

        Ok(Model { initial: doc.state.clone(), actions, events, loaded_delay: doc.loaded_delay })
    }
}
