use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use super::clock::Clock;
use super::model::{Model, Schedule, NOOP};
use super::LOADED;
use crate::expr::{EvalError, Expr};
use crate::protocol::{executor_accepts, CheckerMessage, Descriptor, ExecutorMessage};
use crate::state::{State, StateView};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecutorError {
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("unknown dependency `{0}`")]
    UnknownDependency(String),
    #[error("the model has no action `{0}`")]
    UnknownAction(String),
    #[error("the model has no event `{0}`")]
    UnknownEvent(String),
    #[error("{context}: {source}")]
    Eval { context: String, source: EvalError },
}

/// Model key of an action descriptor: the id followed by its arguments,
/// so that `click(#toggle)` becomes `click#toggle`.
pub fn action_key(d: &Descriptor) -> String {
    let mut key = d.id().to_string();
    for a in &d.args {
        match a {
            Value::String(s) => key.push_str(s),
            other => key.push_str(&other.to_string()),
        }
    }
    key
}

/// Projects the model's fields onto `dependencies`.
pub fn snapshot(fields: &BTreeMap<String, Value>, dependencies: &[String]) -> Result<State, ExecutorError> {
    let mut state = State::new();
    for d in dependencies {
        let v = fields.get(d).ok_or_else(|| ExecutorError::UnknownDependency(d.clone()))?;
        state.fields.insert(d.clone(), v.clone());
    }
    Ok(state)
}

struct Fields<'a>(&'a BTreeMap<String, Value>);

impl StateView for Fields<'_> {
    fn field(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    fn happened(&self) -> &[String] {
        &[]
    }
}

#[derive(Debug, Clone, Copy)]
enum Due {
    Loaded,
    Event(usize),
}

/// One session of a model: the executor's half of the protocol, driven
/// one checker message at a time. Time is logical and only moves while the
/// checker waits.
pub struct ModelSession {
    model: Model,
    fields: BTreeMap<String, Value>,
    dependencies: Option<Vec<String>>,
    full_snapshots: bool,
    trace_len: u64,
    clock: Clock<Due>,
    loaded: bool,
    ended: bool,
    actions_performed: usize,
}

impl ModelSession {
    pub fn new(model: Model) -> Self {
        let fields = model.initial.clone();
        ModelSession {
            model,
            fields,
            dependencies: None,
            full_snapshots: false,
            trace_len: 0,
            clock: Clock::new(),
            loaded: false,
            ended: false,
            actions_performed: 0,
        }
    }

    /// Reports every model field in every state, ignoring `Start`'s
    /// dependencies. Used to observe which fields a checker reads.
    pub fn with_full_snapshots(mut self) -> Self {
        self.full_snapshots = true;
        self
    }

    pub fn now(&self) -> u64 {
        self.clock.now()
    }

    pub fn trace_len(&self) -> u64 {
        self.trace_len
    }

    /// Number of accepted `Act` requests.
    pub fn actions_performed(&self) -> usize {
        self.actions_performed
    }

    pub fn fields(&self) -> &BTreeMap<String, Value> {
        &self.fields
    }

    pub fn is_ended(&self) -> bool {
        self.ended
    }

    /// Handles one checker message, returning the replies in order.
    pub fn handle(&mut self, msg: &CheckerMessage) -> Result<Vec<ExecutorMessage>, ExecutorError> {
        if self.ended {
            return Err(ExecutorError::ProtocolViolation("message after End".into()));
        }
        match msg {
            CheckerMessage::Start { dependencies } => {
                if self.dependencies.is_some() {
                    return Err(ExecutorError::ProtocolViolation("second Start".into()));
                }
                snapshot(&self.fields, dependencies)?;
                self.dependencies = Some(dependencies.clone());
                self.clock.schedule(self.clock.now() + self.model.loaded_delay, Due::Loaded);
                Ok(Vec::new())
            }
            CheckerMessage::End => {
                self.ended = true;
                Ok(Vec::new())
            }
            CheckerMessage::Act { version, .. } | CheckerMessage::Wait { version, .. } => {
                if self.dependencies.is_none() {
                    return Err(ExecutorError::ProtocolViolation("request before Start".into()));
                }
                if !executor_accepts(*version, self.trace_len) {
                    return Ok(vec![ExecutorMessage::Stale { version: self.trace_len }]);
                }
                let reply = match msg {
                    CheckerMessage::Act { action, timeout, .. } => {
                        self.perform(action)?;
                        match timeout {
                            None => {
                                let state = self.emit(vec![action.id().to_string()])?;
                                ExecutorMessage::Acted { state, version: self.trace_len }
                            }
                            Some(t) => self.wait(*t)?,
                        }
                    }
                    CheckerMessage::Wait { time, .. } => self.wait(*time)?,
                    _ => unreachable!(),
                };
                Ok(vec![reply])
            }
        }
    }

    /// Fires `event` immediately, whether or not it is due or enabled, and
    /// returns the resulting `Event`. A test hook for forcing interleavings.
    pub fn inject(&mut self, event: &str) -> Result<ExecutorMessage, ExecutorError> {
        let i = self
            .model
            .events
            .iter()
            .position(|e| e.id == event)
            .ok_or_else(|| ExecutorError::UnknownEvent(event.to_string()))?;
        Ok(self.fire_event(i, true)?.expect("forced events always fire"))
    }

    fn perform(&mut self, action: &Descriptor) -> Result<(), ExecutorError> {
        let key = action_key(action);
        match self.model.actions.get(&key) {
            Some(a) => {
                let enabled = match &a.guard {
                    Some(g) => self.eval_bool(g, || format!("guard of `{}`", key))?,
                    None => true,
                };
                if enabled {
                    let effects = a.effects.clone();
                    self.apply(&effects, &key)?;
                }
            }
            None if key == NOOP => {}
            None => return Err(ExecutorError::UnknownAction(key)),
        }
        self.actions_performed += 1;
        let now = self.clock.now();
        for (i, e) in self.model.events.iter().enumerate() {
            if let Schedule::AfterAction { delay, trigger } = &e.schedule {
                if *trigger == key {
                    self.clock.schedule(now + delay, Due::Event(i));
                }
            }
        }
        Ok(())
    }

    /// Runs the clock for up to `time` ms; the first event that fires ends
    /// the wait.
    fn wait(&mut self, time: u64) -> Result<ExecutorMessage, ExecutorError> {
        let deadline = self.clock.now().saturating_add(time);
        while let Some((_, due)) = self.clock.pop_due(deadline) {
            let fired = match due {
                Due::Loaded => Some(self.fire_loaded()?),
                Due::Event(i) => self.fire_event(i, false)?,
            };
            if let Some(msg) = fired {
                return Ok(msg);
            }
        }
        self.clock.advance_to(deadline);
        let state = self.emit(Vec::new())?;
        Ok(ExecutorMessage::Timeout { state, version: self.trace_len })
    }

    fn fire_loaded(&mut self) -> Result<ExecutorMessage, ExecutorError> {
        if !self.loaded {
            self.loaded = true;
            let now = self.clock.now();
            for (i, e) in self.model.events.iter().enumerate() {
                if let Schedule::Periodic(period) = e.schedule {
                    self.clock.schedule(now + period, Due::Event(i));
                }
            }
        }
        let state = self.emit(vec![LOADED.to_string()])?;
        Ok(ExecutorMessage::Event { event: Descriptor::named(LOADED), state, version: self.trace_len })
    }

    fn fire_event(&mut self, i: usize, forced: bool) -> Result<Option<ExecutorMessage>, ExecutorError> {
        let event = self.model.events[i].clone();
        if let (Schedule::Periodic(period), false) = (event.schedule.clone(), forced) {
            self.clock.schedule(self.clock.now() + period, Due::Event(i));
        }
        if !forced {
            if let Some(g) = &event.enabled {
                if !self.eval_bool(g, || format!("enabled condition of `{}`", event.id))? {
                    return Ok(None);
                }
            }
        }
        self.apply(&event.effects, &event.id)?;
        let descriptor = match &event.subject {
            Some(s) => Descriptor::new("changed", vec![Value::String(s.clone())]).expect("non-empty id"),
            None => Descriptor::named(event.id.clone()),
        };
        let state = self.emit(vec![descriptor.id().to_string()])?;
        Ok(Some(ExecutorMessage::Event { event: descriptor, state, version: self.trace_len }))
    }

    /// Evaluates all effects against the current fields, then writes them.
    fn apply(&mut self, effects: &[(String, Expr)], owner: &str) -> Result<(), ExecutorError> {
        let view = Fields(&self.fields);
        let mut updates = Vec::with_capacity(effects.len());
        for (field, e) in effects {
            let v = e.eval(&view).map_err(|source| ExecutorError::Eval {
                context: format!("effect of `{}` on `{}`", owner, field),
                source,
            })?;
            updates.push((field.clone(), v));
        }
        for (field, v) in updates {
            self.fields.insert(field, v);
        }
        Ok(())
    }

    fn eval_bool(&self, e: &Expr, context: impl FnOnce() -> String) -> Result<bool, ExecutorError> {
        e.eval_bool(&Fields(&self.fields)).map_err(|source| ExecutorError::Eval { context: context(), source })
    }

    fn emit(&mut self, happened: Vec<String>) -> Result<State, ExecutorError> {
        let mut state = if self.full_snapshots {
            State { fields: self.fields.clone(), happened: Vec::new() }
        } else {
            snapshot(&self.fields, self.dependencies.as_deref().unwrap_or(&[]))?
        };
        state.happened = happened;
        self.trace_len += 1;
        Ok(state)
    }
}
