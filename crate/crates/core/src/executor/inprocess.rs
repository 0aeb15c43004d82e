use alloc::collections::VecDeque;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::session::ModelSession;
use crate::protocol::{CheckerMessage, Connection, ConnectionError, ExecutorMessage};

/// A model session linked directly to the checker.
///
/// Events can be injected just before a given `Act` is handled, which
/// reproduces the race where the application changes while the checker is
/// still deciding what to do.
pub struct InProcess {
    session: ModelSession,
    inbox: VecDeque<ExecutorMessage>,
    /// (index of the `Act` to precede, event id)
    injections: Vec<(usize, String)>,
    acts: usize,
    log: Option<Vec<(CheckerMessage, Vec<ExecutorMessage>)>>,
}

impl InProcess {
    pub fn new(session: ModelSession) -> Self {
        InProcess { session, inbox: VecDeque::new(), injections: Vec::new(), acts: 0, log: None }
    }

    /// Fires `event` right before the `act`-th `Act` (counting from 0)
    /// reaches the model.
    pub fn inject_before_act(mut self, act: usize, event: &str) -> Self {
        self.injections.push((act, event.to_string()));
        self
    }

    /// Records every request with the messages it produced.
    pub fn with_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn log(&self) -> &[(CheckerMessage, Vec<ExecutorMessage>)] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn session(&self) -> &ModelSession {
        &self.session
    }
}

impl Connection for InProcess {
    fn send(&mut self, msg: &CheckerMessage) -> Result<(), ConnectionError> {
        let fail = |e: super::ExecutorError| ConnectionError::Executor(e.to_string());
        let mut produced = Vec::new();
        if let CheckerMessage::Act { .. } = msg {
            let k = self.acts;
            self.acts += 1;
            for (_, event) in self.injections.iter().filter(|(at, _)| *at == k) {
                produced.push(self.session.inject(event).map_err(fail)?);
            }
        }
        produced.extend(self.session.handle(msg).map_err(fail)?);
        if let Some(log) = &mut self.log {
            log.push((msg.clone(), produced.clone()));
        }
        self.inbox.extend(produced);
        Ok(())
    }

    fn recv(&mut self) -> Result<ExecutorMessage, ConnectionError> {
        self.inbox
            .pop_front()
            .ok_or_else(|| ConnectionError::Protocol("waiting for a reply the executor will never send".into()))
    }
}
