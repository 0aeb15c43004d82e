use serde::{Deserialize, Serialize};

use super::{simplify, unroll, Formula, Guarded, NextKind, Simplified};
use crate::expr::EvalError;
use crate::state::StateView;
use crate::verdict::{ExtVerdict, Verdict};

/// Largest guarded formula a [`Progression`] will carry between states.
pub const DEFAULT_NODE_LIMIT: usize = 100_000;

/// The verdict a guarded formula gives if the trace ends here.
///
/// Any remaining required-next means the trace is too short to judge.
/// Otherwise weak nexts default to true and strong nexts to false, and the
/// folded result is weakened to a presumptive verdict.
pub fn presumptive(g: &Guarded) -> ExtVerdict {
    fn fold(g: &Guarded) -> bool {
        match g {
            Guarded::And(a, b) => fold(a) && fold(b),
            Guarded::Or(a, b) => fold(a) || fold(b),
            Guarded::Next(NextKind::Weak, _) => true,
            Guarded::Next(_, _) => false,
        }
    }
    if g.has_required() {
        ExtVerdict::Demands
    } else {
        Verdict::definite(fold(g)).weaken().into()
    }
}

/// Strips one layer of next guards.
pub fn step_forward(g: &Guarded) -> Formula {
    match g {
        Guarded::And(a, b) => Formula::and(step_forward(a), step_forward(b)),
        Guarded::Or(a, b) => Formula::or(step_forward(a), step_forward(b)),
        Guarded::Next(_, f) => f.clone(),
    }
}

/// Result of evaluating a formula over a finite trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub verdict: ExtVerdict,
    pub states_consumed: usize,
    /// Index of the state at which the verdict became definitive.
    pub definitive_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error("cannot evaluate a formula over an empty trace")]
    Empty,
    #[error("state {index}: {source}")]
    Eval { index: usize, source: EvalError },
}

/// What a [`Progression`] knows after observing a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Definitive(Verdict),
    /// No verdict yet; `requires_more` is set while a required-next remains.
    Pending { requires_more: bool },
}

#[derive(Debug, Clone)]
enum Phase {
    Unstarted(Formula),
    Guarded(Guarded),
    Done { verdict: Verdict, at: usize },
}

/// Incremental evaluation of one formula, one state at a time.
#[derive(Debug, Clone)]
pub struct Progression {
    phase: Phase,
    consumed: usize,
    node_limit: usize,
}

impl Progression {
    pub fn new(formula: Formula) -> Self {
        Progression { phase: Phase::Unstarted(formula), consumed: 0, node_limit: DEFAULT_NODE_LIMIT }
    }

    pub fn with_node_limit(mut self, limit: usize) -> Self {
        self.node_limit = limit;
        self
    }

    /// Feeds the next state. Once definitive, further states are ignored.
    pub fn observe<S: StateView + ?Sized>(&mut self, state: &S) -> Result<Step, EvalError> {
        let formula = match &self.phase {
            Phase::Done { verdict, .. } => return Ok(Step::Definitive(*verdict)),
            Phase::Unstarted(f) => unroll(f, state)?,
            Phase::Guarded(g) => unroll(&step_forward(g), state)?,
        };
        let index = self.consumed;
        self.consumed += 1;
        match simplify(&formula) {
            Simplified::Definitive(verdict) => {
                self.phase = Phase::Done { verdict, at: index };
                Ok(Step::Definitive(verdict))
            }
            Simplified::Guarded(g) => {
                let size = g.node_count();
                if size > self.node_limit {
                    return Err(EvalError::FormulaTooLarge { size, limit: self.node_limit });
                }
                let requires_more = g.has_required();
                self.phase = Phase::Guarded(g);
                Ok(Step::Pending { requires_more })
            }
        }
    }

    pub fn states_consumed(&self) -> usize {
        self.consumed
    }

    pub fn is_definitive(&self) -> bool {
        matches!(self.phase, Phase::Done { .. })
    }

    pub fn requires_more(&self) -> bool {
        match &self.phase {
            Phase::Unstarted(_) => true,
            Phase::Guarded(g) => g.has_required(),
            Phase::Done { .. } => false,
        }
    }

    /// The guarded formula carried to the next state, if any.
    pub fn guarded(&self) -> Option<&Guarded> {
        match &self.phase {
            Phase::Guarded(g) => Some(g),
            _ => None,
        }
    }

    /// Size of the formula currently carried.
    pub fn node_count(&self) -> usize {
        match &self.phase {
            Phase::Unstarted(f) => f.node_count(),
            Phase::Guarded(g) => g.node_count(),
            Phase::Done { .. } => 1,
        }
    }

    /// The verdict if the trace ended now. `None` before any state.
    pub fn outcome(&self) -> Option<Outcome> {
        let (verdict, definitive_at) = match &self.phase {
            Phase::Unstarted(_) => return None,
            Phase::Guarded(g) => (presumptive(g), None),
            Phase::Done { verdict, at } => ((*verdict).into(), Some(*at)),
        };
        Some(Outcome { verdict, states_consumed: self.consumed, definitive_at })
    }
}

/// Evaluates a formula over a whole trace, stopping at the first
/// definitive verdict.
pub fn evaluate_trace<S: StateView>(formula: &Formula, trace: &[S]) -> Result<Outcome, TraceError> {
    if trace.is_empty() {
        return Err(TraceError::Empty);
    }
    let mut progression = Progression::new(formula.clone());
    for (index, state) in trace.iter().enumerate() {
        let step = progression.observe(state).map_err(|source| TraceError::Eval { index, source })?;
        if let Step::Definitive(_) = step {
            break;
        }
    }
    Ok(progression.outcome().expect("at least one state observed"))
}
