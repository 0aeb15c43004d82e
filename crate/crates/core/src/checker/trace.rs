use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::protocol::Descriptor;
use crate::speclang::ElaboratedSpec;
use crate::state::State;

/// Why a state was appended to the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Cause {
    /// The event that starts checking, normally `loaded`.
    InitialEvent { event: Descriptor, matched: Vec<String> },
    /// The user action `action` (e.g. `start!`) was performed as `descriptor`.
    ActionPerformed { action: String, descriptor: Descriptor },
    /// An asynchronous event, with the names of the declared events it matches.
    EventOccurred { event: Descriptor, matched: Vec<String> },
    /// A timeout elapsed, either after the named action or after a plain wait.
    TimedOut { action: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub state: State,
    pub cause: Cause,
}

/// The `happened` labels of a state produced by `cause`.
pub fn synthesize_happened(cause: &Cause) -> Vec<String> {
    match cause {
        Cause::ActionPerformed { action, .. } => vec![action.clone()],
        Cause::InitialEvent { matched, .. } | Cause::EventOccurred { matched, .. } => matched.clone(),
        Cause::TimedOut { action } => action.iter().cloned().collect(),
    }
}

/// Names of the declared events that `event` matches, given the state it
/// carries. An event matches when its id equals the declared event's primitive
/// and its arguments equal the declared event's evaluated arguments. Events no
/// declared event matches are labelled with their own id and a `?`.
pub fn match_event(spec: &ElaboratedSpec, event: &Descriptor, state: &State) -> Vec<String> {
    let mut matched: Vec<String> = spec
        .events
        .values()
        .filter(|e| e.primitive == event.id() && e.args.len() == event.args.len())
        .filter(|e| e.args.iter().zip(&event.args).all(|(a, v)| a.eval(state).is_ok_and(|x| &x == v)))
        .map(|e| e.name.clone())
        .collect();
    if matched.is_empty() {
        matched.push(format!("{}?", event.id()));
    }
    matched
}
