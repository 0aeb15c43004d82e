//! Messages exchanged between the checker and an executor.
//!
//! Every message after `Start` carries a version: the length of the trace
//! as its sender knows it. The executor refuses requests whose version
//! does not match its own trace length and answers them with `Stale`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::State;
use crate::value::Value;

/// An action or event as it travels over the wire: a primitive id such as
/// `click` or `changed`, plus arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDescriptor")]
pub struct Descriptor {
    id: String,
    pub args: Vec<Value>,
}

#[derive(Deserialize)]
struct RawDescriptor {
    id: String,
    #[serde(default)]
    args: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("descriptor id must not be empty")]
pub struct EmptyDescriptorId;

impl TryFrom<RawDescriptor> for Descriptor {
    type Error = EmptyDescriptorId;

    fn try_from(raw: RawDescriptor) -> Result<Self, Self::Error> {
        Descriptor::new(raw.id, raw.args)
    }
}

impl Descriptor {
    pub fn new(id: impl Into<String>, args: Vec<Value>) -> Result<Self, EmptyDescriptorId> {
        let id = id.into();
        if id.is_empty() {
            return Err(EmptyDescriptorId);
        }
        Ok(Descriptor { id, args })
    }

    /// A descriptor without arguments.
    ///
    /// # Panics
    /// If `id` is empty.
    pub fn named(id: impl Into<String>) -> Self {
        Descriptor::new(id, Vec::new()).expect("non-empty descriptor id")
    }

    pub fn id(&self) -> &str {
        &self.id
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", a)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum CheckerMessage {
    /// Begin a session, reporting the given fields in every state.
    Start { dependencies: Vec<String> },
    /// Perform an action. With a timeout, the reply is the first event
    /// within that many milliseconds, or a `Timeout`.
    Act {
        action: Descriptor,
        version: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        timeout: Option<u64>,
    },
    /// Reply with the first event within `time` milliseconds, or a `Timeout`.
    Wait { time: u64, version: u64 },
    End,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum ExecutorMessage {
    Event { event: Descriptor, state: State, version: u64 },
    Acted { state: State, version: u64 },
    Timeout { state: State, version: u64 },
    /// The request carried an outdated version; nothing was done.
    Stale { version: u64 },
}

impl ExecutorMessage {
    pub fn version(&self) -> u64 {
        match self {
            ExecutorMessage::Event { version, .. }
            | ExecutorMessage::Acted { version, .. }
            | ExecutorMessage::Timeout { version, .. }
            | ExecutorMessage::Stale { version } => *version,
        }
    }

    pub fn state(&self) -> Option<&State> {
        match self {
            ExecutorMessage::Event { state, .. }
            | ExecutorMessage::Acted { state, .. }
            | ExecutorMessage::Timeout { state, .. } => Some(state),
            ExecutorMessage::Stale { .. } => None,
        }
    }
}

/// Whether the executor performs a request sent at `version` when its own
/// trace has `trace_len` states. Anything but an exact match is stale,
/// including versions from the future.
pub fn executor_accepts(version: u64, trace_len: u64) -> bool {
    version == trace_len
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConnectionError {
    #[error("executor closed the connection")]
    Closed,
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("transport error: {0}")]
    Io(String),
    #[error("executor failed: {0}")]
    Executor(String),
}

/// The checker's side of a connection: an ordered, full-duplex message
/// stream.
pub trait Connection {
    fn send(&mut self, msg: &CheckerMessage) -> Result<(), ConnectionError>;
    /// Blocks until the next executor message.
    fn recv(&mut self) -> Result<ExecutorMessage, ConnectionError>;
}

impl<C: Connection + ?Sized> Connection for &mut C {
    fn send(&mut self, msg: &CheckerMessage) -> Result<(), ConnectionError> {
        (**self).send(msg)
    }

    fn recv(&mut self) -> Result<ExecutorMessage, ConnectionError> {
        (**self).recv()
    }
}

impl<C: Connection + ?Sized> Connection for alloc::boxed::Box<C> {
    fn send(&mut self, msg: &CheckerMessage) -> Result<(), ConnectionError> {
        (**self).send(msg)
    }

    fn recv(&mut self) -> Result<ExecutorMessage, ConnectionError> {
        (**self).recv()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acceptance_is_exact() {
        assert!(!executor_accepts(3, 4));
        assert!(executor_accepts(0, 0));
        assert!(executor_accepts(4, 4));
        assert!(!executor_accepts(5, 4));
    }

    #[test]
    fn descriptor_rejects_empty_id() {
        assert_eq!(Descriptor::new("", Vec::new()), Err(EmptyDescriptorId));
    }
}
