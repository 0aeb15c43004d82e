//! The test-session loop: drives an executor, picks random actions,
//! records the trace and progresses the property formula over it.

mod select;
mod trace;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use select::{select_action, Decision};
pub use trace::{match_event, synthesize_happened, Cause, TraceEntry};

use crate::expr::EvalError;
use crate::formula::{Progression, Step};
use crate::protocol::{CheckerMessage, Connection, ConnectionError, Descriptor, ExecutorMessage};
use crate::speclang::{analyze_deps, CheckConfig, ElaboratedSpec};
use crate::state::State;
use crate::verdict::{ExtVerdict, Verdict};

/// The random source of one run: ChaCha8 seeded with `seed`, on stream
/// `run`, so that runs are independent and individually replayable.
pub fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Budget {
    pub runs: usize,
    /// Soft limit: a run stops once this many requests were sent and the
    /// formula does not demand another state.
    pub max_actions: usize,
    /// Hard limit on requests per run.
    pub hard_cap: usize,
}

impl Budget {
    /// A budget with the hard cap at ten times `max_actions`.
    pub fn new(runs: usize, max_actions: usize) -> Self {
        Budget { runs, max_actions, hard_cap: max_actions.saturating_mul(10) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub budget: Budget,
    /// Wait used when no action is enabled.
    pub poll_ms: u64,
    /// How long to wait for the initial event.
    pub startup_ms: u64,
    /// Consecutive waits without any state change before giving up.
    pub stuck_waits: usize,
    /// Stop after the first failing run.
    pub fail_fast: bool,
}

impl CheckOptions {
    pub fn new(budget: Budget) -> Self {
        CheckOptions { budget, poll_ms: 100, startup_ms: 60_000, stuck_waits: 10, fail_fast: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RunVerdict {
    DefinitelyFalse,
    PresumablyFalse,
    PresumablyTrue,
    DefinitelyTrue,
    Inconclusive,
}

impl RunVerdict {
    pub fn is_failure(self) -> bool {
        matches!(self, RunVerdict::DefinitelyFalse | RunVerdict::PresumablyFalse)
    }

    pub fn verdict(self) -> Option<Verdict> {
        Some(match self {
            RunVerdict::DefinitelyFalse => Verdict::DefinitelyFalse,
            RunVerdict::PresumablyFalse => Verdict::PresumablyFalse,
            RunVerdict::PresumablyTrue => Verdict::PresumablyTrue,
            RunVerdict::DefinitelyTrue => Verdict::DefinitelyTrue,
            RunVerdict::Inconclusive => return None,
        })
    }
}

impl From<Verdict> for RunVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::DefinitelyFalse => RunVerdict::DefinitelyFalse,
            Verdict::PresumablyFalse => RunVerdict::PresumablyFalse,
            Verdict::PresumablyTrue => RunVerdict::PresumablyTrue,
            Verdict::DefinitelyTrue => RunVerdict::DefinitelyTrue,
        }
    }
}

impl fmt::Display for RunVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict() {
            Some(v) => v.fmt(f),
            None => f.write_str("inconclusive"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum InconclusiveReason {
    /// The formula still demanded states when the hard cap was reached.
    HardCap,
    /// The formula demanded states but nothing happened for many waits.
    StuckNoEnabledActions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunResult {
    pub run: u64,
    pub seed: u64,
    pub verdict: RunVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<InconclusiveReason>,
    /// Index of the state at which the verdict became definitive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decided_at: Option<usize>,
    pub actions_taken: usize,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Overall {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub property: String,
    pub runs: Vec<RunResult>,
    pub overall: Overall,
}

impl CheckResult {
    pub fn new(property: String, mut runs: Vec<RunResult>) -> Self {
        runs.sort_by_key(|r| r.run);
        let overall = if runs.iter().any(|r| r.verdict.is_failure()) {
            Overall::Fail
        } else if runs.iter().any(|r| r.verdict == RunVerdict::Inconclusive) {
            Overall::Inconclusive
        } else {
            Overall::Pass
        };
        CheckResult { property, runs, overall }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("executor died: {0}")]
    ExecutorDied(String),
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("guard of `{action}`: {source}")]
    GuardEval { action: String, source: EvalError },
    #[error("state {index}: {source}")]
    Eval { index: usize, source: EvalError },
    #[error("`{0}` is not a checked property")]
    UnknownProperty(String),
}

impl From<ConnectionError> for CheckError {
    fn from(e: ConnectionError) -> Self {
        match e {
            ConnectionError::Protocol(m) => CheckError::ProtocolViolation(m),
            other => CheckError::ExecutorDied(other.to_string()),
        }
    }
}

struct Run<'a, C> {
    spec: &'a ElaboratedSpec,
    conn: C,
    trace: Vec<TraceEntry>,
    progression: Progression,
    step: Step,
}

enum Reply {
    Done,
    Stale,
}

impl<C: Connection> Run<'_, C> {
    fn push(&mut self, mut state: State, cause: Cause) -> Result<(), CheckError> {
        state.happened = synthesize_happened(&cause);
        let index = self.trace.len();
        if !self.progression.is_definitive() {
            self.step = self.progression.observe(&state).map_err(|source| CheckError::Eval { index, source })?;
        }
        self.trace.push(TraceEntry { state, cause });
        Ok(())
    }

    fn expect_version(&self, v: u64) -> Result<(), CheckError> {
        let want = self.trace.len() as u64 + 1;
        if v != want {
            return Err(CheckError::ProtocolViolation(alloc::format!("expected version {}, got {}", want, v)));
        }
        Ok(())
    }

    fn event(&mut self, event: Descriptor, state: State, version: u64) -> Result<(), CheckError> {
        self.expect_version(version)?;
        let matched = match_event(self.spec, &event, &state);
        self.push(state, Cause::EventOccurred { event, matched })
    }

    /// Sends `decision` and consumes messages up to its reply.
    fn dispatch(&mut self, decision: &Decision) -> Result<Reply, CheckError> {
        let version = self.trace.len() as u64;
        let (msg, acted, timed) = match decision {
            Decision::Act { action, descriptor, timeout } => (
                CheckerMessage::Act { action: descriptor.clone(), version, timeout: *timeout },
                timeout.is_none().then(|| (action.clone(), descriptor.clone())),
                timeout.map(|_| action.clone()),
            ),
            Decision::Wait { time } => (CheckerMessage::Wait { time: *time, version }, None, None),
        };
        let waiting = acted.is_none();
        self.conn.send(&msg)?;
        loop {
            match self.conn.recv()? {
                ExecutorMessage::Event { event, state, version } => {
                    self.event(event, state, version)?;
                    if waiting {
                        return Ok(Reply::Done);
                    }
                }
                ExecutorMessage::Acted { state, version } => {
                    let Some((action, descriptor)) = acted.clone() else {
                        return Err(CheckError::ProtocolViolation("Acted in reply to a wait".into()));
                    };
                    self.expect_version(version)?;
                    self.push(state, Cause::ActionPerformed { action, descriptor })?;
                    return Ok(Reply::Done);
                }
                ExecutorMessage::Timeout { state, version } => {
                    if !waiting {
                        return Err(CheckError::ProtocolViolation("Timeout in reply to an action".into()));
                    }
                    self.expect_version(version)?;
                    self.push(state, Cause::TimedOut { action: timed.clone() })?;
                    return Ok(Reply::Done);
                }
                ExecutorMessage::Stale { version: v } => {
                    if v != self.trace.len() as u64 || v == version {
                        return Err(CheckError::ProtocolViolation(alloc::format!(
                            "Stale({}) for a request at version {} with {} states received",
                            v,
                            version,
                            self.trace.len()
                        )));
                    }
                    return Ok(Reply::Stale);
                }
            }
        }
    }

    /// The largest timeout declared by the events that produced the newest state.
    fn event_timeout(&self) -> Option<u64> {
        match &self.trace.last()?.cause {
            Cause::EventOccurred { matched, .. } => {
                matched.iter().filter_map(|n| self.spec.events.get(n)?.timeout).max()
            }
            _ => None,
        }
    }
}

/// Runs one property once against a fresh executor connection.
pub fn run_once<C: Connection>(
    spec: &ElaboratedSpec,
    check: &CheckConfig,
    property: &str,
    conn: C,
    seed: u64,
    run: u64,
    options: &CheckOptions,
) -> Result<RunResult, CheckError> {
    let formula = spec.properties.get(property).ok_or_else(|| CheckError::UnknownProperty(property.to_string()))?;
    let check = check.for_property(property);
    let dependencies: Vec<String> = analyze_deps(spec, &check).into_iter().collect();
    let mut rng = run_rng(seed, run);
    let mut r = Run {
        spec,
        conn,
        trace: Vec::new(),
        progression: Progression::new(formula.clone()),
        step: Step::Pending { requires_more: true },
    };

    r.conn.send(&CheckerMessage::Start { dependencies })?;
    r.conn.send(&CheckerMessage::Wait { time: options.startup_ms, version: 0 })?;
    match r.conn.recv()? {
        ExecutorMessage::Event { event, state, version } if event.id() == crate::executor::LOADED => {
            r.expect_version(version)?;
            let matched = match_event(spec, &event, &state);
            r.push(state, Cause::InitialEvent { event, matched })?;
        }
        other => {
            return Err(CheckError::ProtocolViolation(alloc::format!(
                "expected the loaded event, got {:?}",
                other
            )))
        }
    }

    let budget = options.budget;
    let mut actions_taken = 0;
    let mut fruitless_waits = 0;
    let mut reason = None;
    loop {
        let requires_more = match r.step {
            Step::Definitive(_) => break,
            Step::Pending { requires_more } => requires_more,
        };
        if !requires_more && actions_taken >= budget.max_actions {
            break;
        }
        if actions_taken >= budget.hard_cap {
            reason = Some(InconclusiveReason::HardCap);
            break;
        }
        if requires_more && fruitless_waits >= options.stuck_waits {
            reason = Some(InconclusiveReason::StuckNoEnabledActions);
            break;
        }
        let newest = r.trace.len();
        let decision = loop {
            let decision = match r.event_timeout() {
                Some(time) => Decision::Wait { time },
                None => {
                    let current = &r.trace.last().expect("trace starts with the initial event").state;
                    select_action(current, &spec.actions, &check, options.poll_ms, &mut rng)?
                }
            };
            match r.dispatch(&decision)? {
                Reply::Done => break decision,
                Reply::Stale => continue,
            }
        };
        actions_taken += 1;
        let unchanged = r.trace.len() == newest + 1
            && matches!(r.trace.last().map(|e| &e.cause), Some(Cause::TimedOut { action: None }))
            && r.trace[newest].state.fields == r.trace[newest - 1].state.fields;
        if matches!(decision, Decision::Wait { .. }) && unchanged {
            fruitless_waits += 1;
        } else {
            fruitless_waits = 0;
        }
    }
    r.conn.send(&CheckerMessage::End)?;

    let outcome = r.progression.outcome().expect("at least one state observed");
    let verdict = match (reason, outcome.verdict) {
        (Some(_), _) | (None, ExtVerdict::Demands) => RunVerdict::Inconclusive,
        (None, ExtVerdict::Verdict(v)) => v.into(),
    };
    Ok(RunResult { run, seed, verdict, reason, decided_at: outcome.definitive_at, actions_taken, trace: r.trace })
}

/// Checks `property` over `options.budget.runs` runs, each against a fresh
/// connection from `connect`.
pub fn run_check<C, F>(
    spec: &ElaboratedSpec,
    check: &CheckConfig,
    property: &str,
    mut connect: F,
    seed: u64,
    options: &CheckOptions,
) -> Result<CheckResult, CheckError>
where
    C: Connection,
    F: FnMut(u64) -> Result<C, ConnectionError>,
{
    let mut runs = Vec::new();
    for run in 0..options.budget.runs as u64 {
        let result = run_once(spec, check, property, connect(run)?, seed, run, options)?;
        let failed = result.verdict.is_failure();
        runs.push(result);
        if failed && options.fail_fast {
            break;
        }
    }
    Ok(CheckResult::new(property.to_string(), runs))
}
