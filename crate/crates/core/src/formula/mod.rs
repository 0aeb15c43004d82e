//! Multi-valued finite-trace temporal formulas and their evaluation by
//! progression.
//!
//! Evaluation repeats three phases per state: [`unroll`] the formula
//! against the state, [`simplify`] the result into either a definitive
//! verdict or a [`Guarded`] formula, and [`step_forward`] the guarded
//! formula so it can be unrolled against the next state. When the trace
//! runs out, [`presumptive`] reads a verdict off the guarded form.

mod progress;
pub mod random;
mod simplify;
mod unroll;

pub use progress::{
    evaluate_trace, presumptive, step_forward, Outcome, Progression, Step, TraceError, DEFAULT_NODE_LIMIT,
};
pub use simplify::{negate, simplify, Simplified};
pub use unroll::unroll;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::expr::Expr;
use crate::value::Value;

/// The three next-state modalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NextKind {
    /// Demands that another state be produced.
    Required,
    /// Defaults to true when there is no next state.
    Weak,
    /// Defaults to false when there is no next state.
    Strong,
}

impl NextKind {
    pub fn dual(self) -> Self {
        match self {
            NextKind::Required => NextKind::Required,
            NextKind::Weak => NextKind::Strong,
            NextKind::Strong => NextKind::Weak,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            NextKind::Required => "next",
            NextKind::Weak => "nextW",
            NextKind::Strong => "nextS",
        }
    }
}

/// A temporal formula. Subscripts on temporal operators give the minimum
/// number of states that must be observed before a presumptive verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Formula {
    Top,
    Bottom,
    Atom(Expr),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(NextKind, Box<Formula>),
    Always(u32, Box<Formula>),
    Eventually(u32, Box<Formula>),
    Until(u32, Box<Formula>, Box<Formula>),
    Release(u32, Box<Formula>, Box<Formula>),
    /// Evaluates `expr` in the state where this node is unrolled and binds
    /// the result to `binder` inside `body`.
    Freeze { binder: String, expr: Expr, body: Box<Formula> },
}

/// Conjunctions and disjunctions of next-guarded formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Guarded {
    And(Box<Guarded>, Box<Guarded>),
    Or(Box<Guarded>, Box<Guarded>),
    Next(NextKind, Formula),
}

impl Formula {
    pub fn atom(e: Expr) -> Self {
        Formula::Atom(e)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    pub fn next(kind: NextKind, f: Formula) -> Self {
        Formula::Next(kind, Box::new(f))
    }

    pub fn next_required(f: Formula) -> Self {
        Formula::next(NextKind::Required, f)
    }

    pub fn next_weak(f: Formula) -> Self {
        Formula::next(NextKind::Weak, f)
    }

    pub fn next_strong(f: Formula) -> Self {
        Formula::next(NextKind::Strong, f)
    }

    pub fn always(n: u32, f: Formula) -> Self {
        Formula::Always(n, Box::new(f))
    }

    pub fn eventually(n: u32, f: Formula) -> Self {
        Formula::Eventually(n, Box::new(f))
    }

    pub fn until(n: u32, a: Formula, b: Formula) -> Self {
        Formula::Until(n, Box::new(a), Box::new(b))
    }

    pub fn release(n: u32, a: Formula, b: Formula) -> Self {
        Formula::Release(n, Box::new(a), Box::new(b))
    }

    pub fn freeze(binder: impl Into<String>, expr: Expr, body: Formula) -> Self {
        Formula::Freeze { binder: binder.into(), expr, body: Box::new(body) }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Next(_, f) | Formula::Always(_, f) | Formula::Eventually(_, f) => {
                1 + f.node_count()
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(_, a, b) | Formula::Release(_, a, b) => {
                1 + a.node_count() + b.node_count()
            }
            Formula::Freeze { body, .. } => 1 + body.node_count(),
        }
    }

    /// Total number of next operators anywhere in the formula.
    pub fn next_count(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => 0,
            Formula::Next(_, f) => 1 + f.next_count(),
            Formula::Not(f) | Formula::Always(_, f) | Formula::Eventually(_, f) => f.next_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(_, a, b) | Formula::Release(_, a, b) => {
                a.next_count() + b.next_count()
            }
            Formula::Freeze { body, .. } => body.next_count(),
        }
    }

    /// Replaces free occurrences of a freeze-bound variable with a constant.
    pub fn substitute(&self, name: &str, value: &Value) -> Formula {
        self.replace_var(name, &Expr::Literal(value.clone()))
    }

    /// Replaces free occurrences of a variable with an expression.
    pub fn replace_var(&self, name: &str, with: &Expr) -> Formula {
        let sub = |f: &Formula| Box::new(f.replace_var(name, with));
        match self {
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::Atom(e) => Formula::Atom(e.replace_var(name, with)),
            Formula::Not(f) => Formula::Not(sub(f)),
            Formula::And(a, b) => Formula::And(sub(a), sub(b)),
            Formula::Or(a, b) => Formula::Or(sub(a), sub(b)),
            Formula::Next(k, f) => Formula::Next(*k, sub(f)),
            Formula::Always(n, f) => Formula::Always(*n, sub(f)),
            Formula::Eventually(n, f) => Formula::Eventually(*n, sub(f)),
            Formula::Until(n, a, b) => Formula::Until(*n, sub(a), sub(b)),
            Formula::Release(n, a, b) => Formula::Release(*n, sub(a), sub(b)),
            Formula::Freeze { binder, expr, body } => Formula::Freeze {
                binder: binder.clone(),
                expr: expr.replace_var(name, with),
                body: if binder == name { body.clone() } else { sub(body) },
            },
        }
    }

    /// Calls `f` on every expression in the formula (atoms and freeze
    /// expressions).
    pub fn for_each_expr(&self, f: &mut impl FnMut(&Expr)) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Atom(e) => f(e),
            Formula::Not(x) | Formula::Next(_, x) | Formula::Always(_, x) | Formula::Eventually(_, x) => {
                x.for_each_expr(f)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(_, a, b) | Formula::Release(_, a, b) => {
                a.for_each_expr(f);
                b.for_each_expr(f);
            }
            Formula::Freeze { expr, body, .. } => {
                f(expr);
                body.for_each_expr(f);
            }
        }
    }

    pub fn collect_fields(&self, out: &mut BTreeSet<String>) {
        self.for_each_expr(&mut |e| e.collect_fields(out));
    }

    /// True when no variable occurs outside the freeze that binds it.
    pub fn is_closed(&self) -> bool {
        fn go(f: &Formula, bound: &mut alloc::vec::Vec<String>) -> bool {
            let expr_ok = |e: &Expr, bound: &alloc::vec::Vec<String>| {
                let mut ok = true;
                e.walk(&mut |x| {
                    if let Expr::Var(v) = x {
                        if !bound.contains(v) {
                            ok = false;
                        }
                    }
                });
                ok
            };
            match f {
                Formula::Top | Formula::Bottom => true,
                Formula::Atom(e) => expr_ok(e, bound),
                Formula::Not(x) | Formula::Next(_, x) | Formula::Always(_, x) | Formula::Eventually(_, x) => {
                    go(x, bound)
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(_, a, b) | Formula::Release(_, a, b) => {
                    go(a, bound) && go(b, bound)
                }
                Formula::Freeze { binder, expr, body } => {
                    if !expr_ok(expr, bound) {
                        return false;
                    }
                    bound.push(binder.clone());
                    let ok = go(body, bound);
                    bound.pop();
                    ok
                }
            }
        }
        go(self, &mut alloc::vec::Vec::new())
    }
}

impl Guarded {
    pub fn and(a: Guarded, b: Guarded) -> Self {
        Guarded::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Guarded, b: Guarded) -> Self {
        Guarded::Or(Box::new(a), Box::new(b))
    }

    pub fn has_required(&self) -> bool {
        match self {
            Guarded::And(a, b) | Guarded::Or(a, b) => a.has_required() || b.has_required(),
            Guarded::Next(k, _) => *k == NextKind::Required,
        }
    }

    pub fn guard_count(&self) -> usize {
        match self {
            Guarded::And(a, b) | Guarded::Or(a, b) => a.guard_count() + b.guard_count(),
            Guarded::Next(..) => 1,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Guarded::And(a, b) | Guarded::Or(a, b) => 1 + a.node_count() + b.node_count(),
            Guarded::Next(_, f) => 1 + f.node_count(),
        }
    }

    /// Total next operators, counting each guard.
    pub fn next_count(&self) -> usize {
        match self {
            Guarded::And(a, b) | Guarded::Or(a, b) => a.next_count() + b.next_count(),
            Guarded::Next(_, f) => 1 + f.next_count(),
        }
    }

    /// Reads the guarded form back as an ordinary formula.
    pub fn to_formula(&self) -> Formula {
        match self {
            Guarded::And(a, b) => Formula::and(a.to_formula(), b.to_formula()),
            Guarded::Or(a, b) => Formula::or(a.to_formula(), b.to_formula()),
            Guarded::Next(k, f) => Formula::next(*k, f.clone()),
        }
    }
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        Formula::Until(..) | Formula::Release(..) => 3,
        Formula::Freeze { .. } => 0,
        _ => 4,
    }
}

struct P<'a>(&'a Formula, u8);

impl fmt::Display for P<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if prec(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => f.write_str("true"),
            Formula::Bottom => f.write_str("false"),
            Formula::Atom(e) => match e {
                Expr::Binary(..) | Expr::If(..) => write!(f, "({})", e),
                _ => write!(f, "{}", e),
            },
            Formula::Not(x) => write!(f, "!{}", P(x, 4)),
            Formula::And(a, b) => write!(f, "{} && {}", P(a, 2), P(b, 3)),
            Formula::Or(a, b) => write!(f, "{} || {}", P(a, 1), P(b, 2)),
            Formula::Next(k, x) => write!(f, "{} {}", k.keyword(), P(x, 4)),
            Formula::Always(n, x) => write!(f, "always_{} {}", n, P(x, 4)),
            Formula::Eventually(n, x) => write!(f, "eventually_{} {}", n, P(x, 4)),
            Formula::Until(n, a, b) => write!(f, "{} until_{} {}", P(a, 4), n, P(b, 3)),
            Formula::Release(n, a, b) => write!(f, "{} release_{} {}", P(a, 4), n, P(b, 3)),
            Formula::Freeze { binder, expr, body } => write!(f, "{{ let {} = {}; {} }}", binder, expr, body),
        }
    }
}

impl fmt::Display for Guarded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}
