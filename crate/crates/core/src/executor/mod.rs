//! A deterministic executor that interprets a guarded-command model
//! instead of driving a real application.

mod clock;
mod inprocess;
mod model;
mod session;

pub use clock::Clock;
pub use inprocess::InProcess;
pub use model::{
    ActionDocument, EventDocument, Model, ModelAction, ModelDocument, ModelError, ModelEvent, Schedule, NOOP,
};
pub use session::{action_key, snapshot, ExecutorError, ModelSession};

/// Id of the event that starts every session.
pub const LOADED: &str = "loaded";
