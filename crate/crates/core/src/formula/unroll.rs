use super::{Formula, NextKind};
use crate::expr::EvalError;
use crate::state::StateView;

/// Unrolls a formula one step and partially evaluates it against `state`.
///
/// Atoms become constants, freezes are resolved by substituting the value
/// of their expression in `state`, and each temporal operator is expanded
/// once. Subformulas already under a next operator are left untouched.
pub fn unroll<S: StateView + ?Sized>(formula: &Formula, state: &S) -> Result<Formula, EvalError> {
    let go = |f: &Formula| unroll(f, state);
    Ok(match formula {
        Formula::Top => Formula::Top,
        Formula::Bottom => Formula::Bottom,
        Formula::Atom(e) => {
            if e.eval_bool(state)? {
                Formula::Top
            } else {
                Formula::Bottom
            }
        }
        Formula::Not(f) => Formula::not(go(f)?),
        Formula::And(a, b) => Formula::and(go(a)?, go(b)?),
        Formula::Or(a, b) => Formula::or(go(a)?, go(b)?),
        Formula::Next(..) => formula.clone(),
        Formula::Always(n, f) => {
            let (kind, rest) = step_subscript(*n, NextKind::Weak);
            Formula::and(go(f)?, Formula::next(kind, Formula::Always(rest, f.clone())))
        }
        Formula::Eventually(n, f) => {
            let (kind, rest) = step_subscript(*n, NextKind::Strong);
            Formula::or(go(f)?, Formula::next(kind, Formula::Eventually(rest, f.clone())))
        }
        Formula::Until(n, a, b) => {
            let (kind, rest) = step_subscript(*n, NextKind::Strong);
            Formula::or(
                go(b)?,
                Formula::and(go(a)?, Formula::next(kind, Formula::Until(rest, a.clone(), b.clone()))),
            )
        }
        Formula::Release(n, a, b) => {
            let (kind, rest) = step_subscript(*n, NextKind::Weak);
            Formula::and(
                go(b)?,
                Formula::or(go(a)?, Formula::next(kind, Formula::Release(rest, a.clone(), b.clone()))),
            )
        }
        Formula::Freeze { binder, expr, body } => {
            let value = expr.eval(state)?;
            go(&body.substitute(binder, &value))?
        }
    })
}

/// A positive subscript demands another state; zero falls back to the
/// operator's default modality.
fn step_subscript(n: u32, at_zero: NextKind) -> (NextKind, u32) {
    if n == 0 {
        (at_zero, 0)
    } else {
        (NextKind::Required, n - 1)
    }
}
