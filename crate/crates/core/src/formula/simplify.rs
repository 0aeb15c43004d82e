use super::{Formula, Guarded};
use crate::verdict::Verdict;

/// Result of simplifying an unrolled formula.
#[derive(Debug, Clone, PartialEq)]
pub enum Simplified {
    /// The formula no longer depends on future states.
    Definitive(Verdict),
    Guarded(Guarded),
}

/// Normalizes an unrolled formula: folds constants, pushes negation
/// through next operators (swapping weak and strong), and drops duplicate
/// siblings.
///
/// The input must be the output of [`unroll`](super::unroll), so every
/// atom, temporal operator and freeze sits under a next operator. Anything
/// else is a caller bug and panics.
pub fn simplify(formula: &Formula) -> Simplified {
    match go(formula, false) {
        Part::Const(b) => Simplified::Definitive(Verdict::definite(b)),
        Part::Guarded(g) => Simplified::Guarded(g),
    }
}

enum Part {
    Const(bool),
    Guarded(Guarded),
}

fn go(f: &Formula, negated: bool) -> Part {
    match f {
        Formula::Top => Part::Const(!negated),
        Formula::Bottom => Part::Const(negated),
        Formula::Not(x) => go(x, !negated),
        Formula::And(a, b) if negated => or(go(a, true), go(b, true)),
        Formula::And(a, b) => and(go(a, false), go(b, false)),
        Formula::Or(a, b) if negated => and(go(a, true), go(b, true)),
        Formula::Or(a, b) => or(go(a, false), go(b, false)),
        Formula::Next(k, x) if negated => Part::Guarded(Guarded::Next(k.dual(), negate(x))),
        Formula::Next(k, x) => Part::Guarded(Guarded::Next(*k, (**x).clone())),
        _ => panic!("simplify called on a formula that was not unrolled: {}", f),
    }
}

fn and(a: Part, b: Part) -> Part {
    match (a, b) {
        (Part::Const(false), _) | (_, Part::Const(false)) => Part::Const(false),
        (Part::Const(true), x) | (x, Part::Const(true)) => x,
        (Part::Guarded(a), Part::Guarded(b)) if a == b => Part::Guarded(a),
        (Part::Guarded(a), Part::Guarded(b)) => Part::Guarded(Guarded::and(a, b)),
    }
}

fn or(a: Part, b: Part) -> Part {
    match (a, b) {
        (Part::Const(true), _) | (_, Part::Const(true)) => Part::Const(true),
        (Part::Const(false), x) | (x, Part::Const(false)) => x,
        (Part::Guarded(a), Part::Guarded(b)) if a == b => Part::Guarded(a),
        (Part::Guarded(a), Part::Guarded(b)) => Part::Guarded(Guarded::or(a, b)),
    }
}

/// Negation normal form of `!f`, with negation only directly above atoms.
pub fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Top => Formula::Bottom,
        Formula::Bottom => Formula::Top,
        Formula::Atom(_) => Formula::not(f.clone()),
        Formula::Not(x) => nnf(x),
        Formula::And(a, b) => Formula::or(negate(a), negate(b)),
        Formula::Or(a, b) => Formula::and(negate(a), negate(b)),
        Formula::Next(k, x) => Formula::next(k.dual(), negate(x)),
        Formula::Always(n, x) => Formula::eventually(*n, negate(x)),
        Formula::Eventually(n, x) => Formula::always(*n, negate(x)),
        Formula::Until(n, a, b) => Formula::release(*n, negate(a), negate(b)),
        Formula::Release(n, a, b) => Formula::until(*n, negate(a), negate(b)),
        Formula::Freeze { binder, expr, body } => Formula::freeze(binder.clone(), expr.clone(), negate(body)),
    }
}

fn nnf(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Not(x) => negate(x),
        Formula::And(a, b) => Formula::and(nnf(a), nnf(b)),
        Formula::Or(a, b) => Formula::or(nnf(a), nnf(b)),
        Formula::Next(k, x) => Formula::next(*k, nnf(x)),
        Formula::Always(n, x) => Formula::always(*n, nnf(x)),
        Formula::Eventually(n, x) => Formula::eventually(*n, nnf(x)),
        Formula::Until(n, a, b) => Formula::until(*n, nnf(a), nnf(b)),
        Formula::Release(n, a, b) => Formula::release(*n, nnf(a), nnf(b)),
        Formula::Freeze { binder, expr, body } => Formula::freeze(binder.clone(), expr.clone(), nnf(body)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::formula::NextKind;

    fn p() -> Formula {
        Formula::atom(Expr::field("p.v"))
    }

    #[test]
    fn folds_constants() {
        let f = Formula::and(Formula::Top, Formula::or(Formula::Bottom, Formula::not(Formula::Bottom)));
        assert_eq!(simplify(&f), Simplified::Definitive(Verdict::DefinitelyTrue));
        let f = Formula::and(Formula::Bottom, Formula::next_required(p()));
        assert_eq!(simplify(&f), Simplified::Definitive(Verdict::DefinitelyFalse));
    }

    #[test]
    fn negated_next_swaps_modality() {
        let f = Formula::not(Formula::next_weak(p()));
        assert_eq!(
            simplify(&f),
            Simplified::Guarded(Guarded::Next(NextKind::Strong, Formula::not(p())))
        );
        let f = Formula::not(Formula::next_required(Formula::always(3, p())));
        assert_eq!(
            simplify(&f),
            Simplified::Guarded(Guarded::Next(NextKind::Required, Formula::eventually(3, Formula::not(p()))))
        );
    }

    #[test]
    fn duplicates_collapse() {
        let g = Formula::next_weak(p());
        let f = Formula::and(g.clone(), Formula::and(Formula::Top, g.clone()));
        assert_eq!(simplify(&f), Simplified::Guarded(Guarded::Next(NextKind::Weak, p())));
    }

    #[test]
    fn idempotent_on_guarded() {
        let g = Guarded::or(
            Guarded::Next(NextKind::Weak, p()),
            Guarded::and(Guarded::Next(NextKind::Strong, p()), Guarded::Next(NextKind::Required, Formula::Top)),
        );
        assert_eq!(simplify(&g.to_formula()), Simplified::Guarded(g));
    }

    #[test]
    fn negate_is_involutive_up_to_nnf() {
        let f = Formula::until(2, Formula::not(p()), Formula::freeze("v", Expr::field("x.v"), p()));
        assert_eq!(negate(&negate(&f)), nnf(&f));
    }

    #[test]
    #[should_panic]
    fn rejects_raw_atoms() {
        simplify(&p());
    }
}
