//! Direct recursive semantics over a complete finite trace.
//!
//! This evaluator has no guarded form and no simplification: each operator
//! is read as its one-step expansion and recursed on. It is exponential and
//! exists to cross-check [`evaluate_trace`](crate::formula::evaluate_trace).

use crate::expr::EvalError;
use crate::formula::{Formula, NextKind};
use crate::state::StateView;
use crate::verdict::{ExtVerdict, Verdict};

/// Verdict of `formula` at position `index` of `trace`.
///
/// Panics if `index` is out of bounds.
pub fn eval_direct<S: StateView>(formula: &Formula, trace: &[S], index: usize) -> Result<ExtVerdict, EvalError> {
    assert!(index < trace.len(), "index {} outside trace of length {}", index, trace.len());
    let here = |f: &Formula| eval_direct(f, trace, index);
    let next = |kind: NextKind, f: &Formula| -> Result<ExtVerdict, EvalError> {
        if index + 1 < trace.len() {
            eval_direct(f, trace, index + 1)
        } else {
            Ok(match kind {
                NextKind::Weak => Verdict::PresumablyTrue.into(),
                NextKind::Strong => Verdict::PresumablyFalse.into(),
                NextKind::Required => ExtVerdict::Demands,
            })
        }
    };
    // Positive subscripts require the next state; at zero the operator's
    // default modality applies.
    let kind_for = |n: u32, at_zero: NextKind| if n == 0 { at_zero } else { NextKind::Required };
    let pred = |n: u32| n.saturating_sub(1);

    match formula {
        Formula::Top => Ok(Verdict::DefinitelyTrue.into()),
        Formula::Bottom => Ok(Verdict::DefinitelyFalse.into()),
        Formula::Atom(e) => Ok(Verdict::definite(e.eval_bool(&trace[index])?).into()),
        Formula::Not(f) => Ok(here(f)?.negate()),
        Formula::And(a, b) => conj(here(a)?, || here(b)),
        Formula::Or(a, b) => disj(here(a)?, || here(b)),
        Formula::Next(kind, f) => next(*kind, f),
        Formula::Always(n, f) => {
            conj(here(f)?, || next(kind_for(*n, NextKind::Weak), &Formula::always(pred(*n), (**f).clone())))
        }
        Formula::Eventually(n, f) => {
            disj(here(f)?, || next(kind_for(*n, NextKind::Strong), &Formula::eventually(pred(*n), (**f).clone())))
        }
        Formula::Until(n, a, b) => disj(here(b)?, || {
            conj(here(a)?, || {
                next(kind_for(*n, NextKind::Strong), &Formula::until(pred(*n), (**a).clone(), (**b).clone()))
            })
        }),
        Formula::Release(n, a, b) => conj(here(b)?, || {
            disj(here(a)?, || {
                next(kind_for(*n, NextKind::Weak), &Formula::release(pred(*n), (**a).clone(), (**b).clone()))
            })
        }),
        Formula::Freeze { binder, expr, body } => {
            let value = expr.eval(&trace[index])?;
            here(&body.substitute(binder, &value))
        }
    }
}

fn conj(
    left: ExtVerdict,
    right: impl FnOnce() -> Result<ExtVerdict, EvalError>,
) -> Result<ExtVerdict, EvalError> {
    if left == Verdict::DefinitelyFalse.into() {
        return Ok(left);
    }
    Ok(left.and(right()?))
}

fn disj(
    left: ExtVerdict,
    right: impl FnOnce() -> Result<ExtVerdict, EvalError>,
) -> Result<ExtVerdict, EvalError> {
    if left == Verdict::DefinitelyTrue.into() {
        return Ok(left);
    }
    Ok(left.or(right()?))
}
