//! Elaboration of a typechecked program into property formulas and action
//! tables.
//!
//! Function applications are inlined. Lazy bindings and parameters (`~`)
//! are substituted as syntax and so are re-evaluated wherever they end up.
//! Eager bindings and parameters that read the state are evaluated once,
//! in the state where their binding site is unrolled, via a freeze node.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use super::ast::*;
use super::typecheck::{typecheck, typecheck_expr, TypeError, BUILTIN_EVENTS};
use crate::expr::{BinOp, Builtin, Expr, UnOp};
use crate::formula::Formula;

/// An action or event with its guard and primitive resolved to expressions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Action {
    pub name: String,
    pub kind: ActionKind,
    /// Primitive id without its `!`/`?` suffix, e.g. `click`.
    pub primitive: String,
    pub args: Vec<Expr>,
    pub guard: Option<Expr>,
    /// Milliseconds.
    pub timeout: Option<u64>,
}

/// One `check` statement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckConfig {
    pub properties: Vec<String>,
    /// Actions and events named in `with`; `None` allows all of them.
    pub allowed: Option<BTreeSet<String>>,
    pub default_subscript: u32,
}

impl CheckConfig {
    pub fn allows(&self, name: &str) -> bool {
        self.allowed.as_ref().is_none_or(|a| a.contains(name))
    }

    /// The same check restricted to one of its properties.
    pub fn for_property(&self, property: &str) -> CheckConfig {
        CheckConfig { properties: alloc::vec![property.to_string()], ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElaboratedSpec {
    /// Formulas of every property named by a `check`.
    pub properties: BTreeMap<String, Formula>,
    /// User actions, keyed by name (`start!`).
    pub actions: BTreeMap<String, Action>,
    /// Events, keyed by name (`tick?`), including the built-in `loaded?`.
    pub events: BTreeMap<String, Action>,
    pub checks: Vec<CheckConfig>,
}

impl ElaboratedSpec {
    pub fn action_or_event(&self, name: &str) -> Option<&Action> {
        self.actions.get(name).or_else(|| self.events.get(name))
    }

    /// The first check that includes `property`.
    pub fn check_for(&self, property: &str) -> Option<&CheckConfig> {
        self.checks.iter().find(|c| c.properties.iter().any(|p| p == property))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ElaborationError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("{pos}: this binding reads the state but is evaluated outside any temporal context; mark it lazy with `~`")]
    StateAccessOutsideTemporalContext { pos: Pos },
    #[error("{pos}: `{name}` is not a property, action or event")]
    UnknownCheckTarget { name: String, pos: Pos },
    #[error("{pos}: a temporal formula cannot be used as a value here")]
    TemporalInValue { pos: Pos },
    #[error("{pos}: fields can only be read from selectors")]
    FieldOfNonSelector { pos: Pos },
    #[error("{pos}: the guard of `{action}` must not be temporal")]
    TemporalGuard { action: String, pos: Pos },
}

#[derive(Debug, Clone)]
enum Term {
    Expr(Expr),
    Formula(Formula),
}

impl Term {
    fn into_formula(self) -> Formula {
        match self {
            Term::Expr(e) => Formula::Atom(e),
            Term::Formula(f) => f,
        }
    }

    fn reads_state(&self) -> bool {
        match self {
            Term::Expr(e) => e.reads_state(),
            Term::Formula(f) => {
                let mut reads = false;
                f.for_each_expr(&mut |e| reads |= e.reads_state());
                reads
            }
        }
    }
}

enum Binding<'a> {
    /// Unevaluated syntax. `depth` is the expansion depth at which the
    /// thunk was created; `None` for top-level bindings.
    Lazy { ast: &'a Ast, env: Env<'a>, depth: Option<usize> },
    Term(Term),
    Function { params: &'a [Param], body: &'a Ast, env: Env<'a> },
}

struct Frame<'a> {
    name: &'a str,
    binding: Binding<'a>,
    parent: Env<'a>,
}

#[derive(Clone)]
struct Env<'a>(Option<Rc<Frame<'a>>>);

impl<'a> Env<'a> {
    fn bind(&self, name: &'a str, binding: Binding<'a>) -> Env<'a> {
        Env(Some(Rc::new(Frame { name, binding, parent: self.clone() })))
    }

    fn lookup(&self, name: &str) -> Option<&Binding<'a>> {
        let mut cur = &self.0;
        while let Some(frame) = cur {
            if frame.name == name {
                return Some(&frame.binding);
            }
            cur = &frame.parent.0;
        }
        None
    }
}

struct Ctx {
    default_subscript: u32,
    /// Whether state reads are allowed (inside a property or guard).
    temporal: bool,
    fresh: usize,
    depth: usize,
    /// Number of top-level bindings; bounds `depth`.
    bindings: usize,
}

pub fn elaborate(program: &Program, default_subscript: u32) -> Result<ElaboratedSpec, ElaborationError> {
    typecheck(program)?;
    let bindings = program.items.iter().filter(|i| matches!(i, TopLevel::Let(_))).count();
    let mut ctx = Ctx { default_subscript, temporal: false, fresh: 0, depth: 0, bindings };
    let mut env = Env(None);
    let mut actions = BTreeMap::new();
    let mut events = BTreeMap::new();
    let mut check_stmts = Vec::new();

    for item in &program.items {
        match item {
            TopLevel::Let(b) => {
                let binding = match (&b.params, b.lazy) {
                    (Some(params), _) => Binding::Function { params, body: &b.body, env: env.clone() },
                    (None, true) => Binding::Lazy { ast: &b.body, env: env.clone(), depth: None },
                    (None, false) => {
                        ctx.temporal = false;
                        let t = ctx.elab(&b.body, &env)?;
                        if t.reads_state() {
                            return Err(ElaborationError::StateAccessOutsideTemporalContext { pos: b.pos });
                        }
                        Binding::Term(t)
                    }
                };
                env = env.bind(&b.name, binding);
            }
            TopLevel::Action(a) => {
                ctx.temporal = true;
                let args = a
                    .args
                    .iter()
                    .map(|arg| ctx.expr(arg, &env))
                    .collect::<Result<Vec<_>, _>>()?;
                let guard = match &a.guard {
                    Some(g) => match ctx.elab(g, &env)? {
                        Term::Expr(e) => Some(e),
                        Term::Formula(_) => {
                            return Err(ElaborationError::TemporalGuard { action: a.name.clone(), pos: g.pos })
                        }
                    },
                    None => None,
                };
                let primitive = a.primitive.trim_end_matches(['!', '?']).to_string();
                let action = Action { name: a.name.clone(), kind: a.kind, primitive, args, guard, timeout: a.timeout };
                match a.kind {
                    ActionKind::User => actions.insert(a.name.clone(), action),
                    ActionKind::Event => events.insert(a.name.clone(), action),
                };
                env = env.bind(&a.name, Binding::Term(Term::Expr(Expr::Action(a.name.clone()))));
            }
            TopLevel::Check(c) => check_stmts.push((c, env.clone())),
        }
    }
    for name in BUILTIN_EVENTS {
        events.entry(name.to_string()).or_insert_with(|| Action {
            name: name.to_string(),
            kind: ActionKind::Event,
            primitive: name.trim_end_matches('?').to_string(),
            args: Vec::new(),
            guard: None,
            timeout: None,
        });
    }

    let mut properties = BTreeMap::new();
    let mut checks = Vec::new();
    for (c, env) in check_stmts {
        for p in &c.properties {
            let formula = match env.lookup(p) {
                Some(Binding::Lazy { .. } | Binding::Term(_)) => {
                    ctx.temporal = true;
                    let pos = c.pos;
                    let ident = Ast::new(AstKind::Ident(p.clone()), pos);
                    ctx.elab(&ident, &env)?.into_formula()
                }
                _ => return Err(ElaborationError::UnknownCheckTarget { name: p.clone(), pos: c.pos }),
            };
            debug_assert!(formula.is_closed(), "property {} is not closed: {}", p, formula);
            properties.insert(p.clone(), formula);
        }
        let allowed = match &c.with {
            Some(names) => {
                for n in names {
                    if !actions.contains_key(n) && !events.contains_key(n) {
                        return Err(ElaborationError::UnknownCheckTarget { name: n.clone(), pos: c.pos });
                    }
                }
                Some(names.iter().cloned().collect())
            }
            None => None,
        };
        checks.push(CheckConfig { properties: c.properties.clone(), allowed, default_subscript });
    }
    Ok(ElaboratedSpec { properties, actions, events, checks })
}

/// Elaborates a standalone, non-temporal expression such as a model guard.
pub fn elaborate_expr(ast: &Ast) -> Result<Expr, ElaborationError> {
    typecheck_expr(ast)?;
    let mut ctx = Ctx { default_subscript: 0, temporal: true, fresh: 0, depth: 0, bindings: 0 };
    ctx.expr(ast, &Env(None))
}

fn logic(op: BinOp, a: Term, b: Term) -> Term {
    match (a, b) {
        (Term::Expr(a), Term::Expr(b)) => Term::Expr(Expr::binary(op, a, b)),
        (a, b) => {
            let (a, b) = (a.into_formula(), b.into_formula());
            Term::Formula(if op == BinOp::And { Formula::and(a, b) } else { Formula::or(a, b) })
        }
    }
}

fn arith_op(op: SurfaceBinOp) -> BinOp {
    match op {
        SurfaceBinOp::Eq => BinOp::Eq,
        SurfaceBinOp::Ne => BinOp::Ne,
        SurfaceBinOp::Lt => BinOp::Lt,
        SurfaceBinOp::Le => BinOp::Le,
        SurfaceBinOp::Gt => BinOp::Gt,
        SurfaceBinOp::Ge => BinOp::Ge,
        SurfaceBinOp::In => BinOp::In,
        SurfaceBinOp::Add => BinOp::Add,
        SurfaceBinOp::Sub => BinOp::Sub,
        SurfaceBinOp::Mul => BinOp::Mul,
        SurfaceBinOp::Div => BinOp::Div,
        SurfaceBinOp::And => BinOp::And,
        SurfaceBinOp::Or | SurfaceBinOp::Implies => BinOp::Or,
    }
}

impl Ctx {
    fn expr<'a>(&mut self, ast: &'a Ast, env: &Env<'a>) -> Result<Expr, ElaborationError> {
        match self.elab(ast, env)? {
            Term::Expr(e) => Ok(e),
            Term::Formula(_) => Err(ElaborationError::TemporalInValue { pos: ast.pos }),
        }
    }

    fn fresh(&mut self, name: &str) -> String {
        self.fresh += 1;
        format!("{}_{}", name, self.fresh)
    }

    /// Evaluates an eager binding. State-reading expressions become a fresh
    /// variable to be frozen around the scope; the pair is returned so the
    /// caller can wrap the scope's result with [`Ctx::close`].
    fn eager<'a>(
        &mut self,
        name: &str,
        value: &'a Ast,
        env: &Env<'a>,
    ) -> Result<(Binding<'a>, Option<(String, Expr)>), ElaborationError> {
        match self.elab(value, env)? {
            Term::Expr(e) if e.reads_state() => {
                if !self.temporal {
                    return Err(ElaborationError::StateAccessOutsideTemporalContext { pos: value.pos });
                }
                let var = self.fresh(name);
                Ok((Binding::Term(Term::Expr(Expr::Var(var.clone()))), Some((var, e))))
            }
            t => Ok((Binding::Term(t), None)),
        }
    }

    /// Wraps the result of a scope that bound `var` to the value of `e`.
    /// Within a single state the expression can simply be substituted;
    /// formulas may look at later states and need a freeze.
    fn close(term: Term, var: &str, e: Expr) -> Term {
        match term {
            Term::Expr(body) => Term::Expr(body.replace_var(var, &e)),
            Term::Formula(body) => Term::Formula(Formula::freeze(var, e, body)),
        }
    }

    fn enter(&mut self) {
        self.depth += 1;
        debug_assert!(self.depth <= self.bindings, "expansion depth {} exceeds {}", self.depth, self.bindings);
    }

    fn elab<'a>(&mut self, ast: &'a Ast, env: &Env<'a>) -> Result<Term, ElaborationError> {
        let pos = ast.pos;
        Ok(match &ast.kind {
            AstKind::Number(n) => Term::Expr(Expr::lit(*n)),
            AstKind::Str(s) => Term::Expr(Expr::lit(s.as_str())),
            AstKind::Bool(b) => Term::Expr(Expr::lit(*b)),
            AstKind::Null => Term::Expr(Expr::Literal(crate::value::Value::Null)),
            AstKind::Selector(s) => Term::Expr(Expr::Selector(s.clone())),
            AstKind::Ident(n) if n == "happened" => Term::Expr(Expr::Happened),
            AstKind::Ident(n) => match env.lookup(n) {
                Some(Binding::Term(t)) => t.clone(),
                Some(Binding::Lazy { ast, env, depth }) => {
                    let saved = self.depth;
                    match depth {
                        Some(d) => self.depth = *d,
                        None => self.enter(),
                    }
                    let (ast, env) = (*ast, env.clone());
                    let r = self.elab(ast, &env);
                    self.depth = saved;
                    r?
                }
                Some(Binding::Function { .. }) => unreachable!("rejected by the type checker"),
                None => Term::Expr(Expr::Action(n.clone())),
            },
            AstKind::Field(base, name) => match self.elab(base, env)? {
                Term::Expr(Expr::Selector(s)) => Term::Expr(Expr::Field(format!("{}.{}", s, name))),
                _ => return Err(ElaborationError::FieldOfNonSelector { pos }),
            },
            AstKind::Call(name, args) => match env.lookup(name) {
                Some(Binding::Function { params, body, env: fenv }) => {
                    let (params, body, fenv) = (*params, *body, fenv.clone());
                    self.apply(params, body, fenv, args, env)?
                }
                _ => {
                    let b = Builtin::lookup(name).expect("checked by the type checker");
                    let args = args.iter().map(|a| self.expr(a, env)).collect::<Result<_, _>>()?;
                    Term::Expr(Expr::Builtin(b, args))
                }
            },
            AstKind::Not(a) => match self.elab(a, env)? {
                Term::Expr(e) => Term::Expr(Expr::not(e)),
                Term::Formula(f) => Term::Formula(Formula::not(f)),
            },
            AstKind::Neg(a) => Term::Expr(Expr::Unary(UnOp::Neg, alloc::boxed::Box::new(self.expr(a, env)?))),
            AstKind::Binary(SurfaceBinOp::And, a, b) => logic(BinOp::And, self.elab(a, env)?, self.elab(b, env)?),
            AstKind::Binary(SurfaceBinOp::Or, a, b) => logic(BinOp::Or, self.elab(a, env)?, self.elab(b, env)?),
            AstKind::Binary(SurfaceBinOp::Implies, a, b) => {
                let lhs = match self.elab(a, env)? {
                    Term::Expr(e) => Term::Expr(Expr::not(e)),
                    Term::Formula(f) => Term::Formula(Formula::not(f)),
                };
                logic(BinOp::Or, lhs, self.elab(b, env)?)
            }
            AstKind::Binary(op, a, b) => Term::Expr(Expr::binary(arith_op(*op), self.expr(a, env)?, self.expr(b, env)?)),
            AstKind::If(c, t, e) => match (self.elab(c, env)?, self.elab(t, env)?, self.elab(e, env)?) {
                (Term::Expr(c), Term::Expr(t), Term::Expr(e)) => Term::Expr(Expr::If(c.into(), t.into(), e.into())),
                (c, t, e) => {
                    let c = c.into_formula();
                    Term::Formula(Formula::or(
                        Formula::and(c.clone(), t.into_formula()),
                        Formula::and(Formula::not(c), e.into_formula()),
                    ))
                }
            },
            AstKind::Seq(items) => Term::Expr(Expr::Seq(
                items.iter().map(|i| self.expr(i, env)).collect::<Result<_, _>>()?,
            )),
            AstKind::Map(entries) => Term::Expr(Expr::Map(
                entries
                    .iter()
                    .map(|(k, v)| Ok((k.clone(), self.expr(v, env)?)))
                    .collect::<Result<_, ElaborationError>>()?,
            )),
            AstKind::Let { name, lazy: true, value, body } => {
                let inner = env.bind(name, Binding::Lazy { ast: value, env: env.clone(), depth: Some(self.depth) });
                self.elab(body, &inner)?
            }
            AstKind::Let { name, lazy: false, value, body } => {
                let (binding, frozen) = self.eager(name, value, env)?;
                let inner = env.bind(name, binding);
                let term = self.elab(body, &inner)?;
                match frozen {
                    Some((var, e)) => Self::close(term, &var, e),
                    None => term,
                }
            }
            AstKind::Next(kind, a) => Term::Formula(Formula::next(*kind, self.elab(a, env)?.into_formula())),
            AstKind::Temporal(op, n, a) => {
                let n = n.unwrap_or(self.default_subscript);
                let f = self.elab(a, env)?.into_formula();
                Term::Formula(match op {
                    TemporalOp::Always => Formula::always(n, f),
                    TemporalOp::Eventually => Formula::eventually(n, f),
                })
            }
            AstKind::BinaryTemporal(op, n, a, b) => {
                let n = n.unwrap_or(self.default_subscript);
                let a = self.elab(a, env)?.into_formula();
                let b = self.elab(b, env)?.into_formula();
                Term::Formula(match op {
                    BinaryTemporalOp::Until => Formula::until(n, a, b),
                    BinaryTemporalOp::Release => Formula::release(n, a, b),
                })
            }
        })
    }

    fn apply<'a>(
        &mut self,
        params: &'a [Param],
        body: &'a Ast,
        fenv: Env<'a>,
        args: &'a [Ast],
        env: &Env<'a>,
    ) -> Result<Term, ElaborationError> {
        let mut inner = fenv;
        let mut frozen = Vec::new();
        for (p, arg) in params.iter().zip(args) {
            let binding = if p.lazy {
                Binding::Lazy { ast: arg, env: env.clone(), depth: Some(self.depth) }
            } else {
                let (binding, f) = self.eager(&p.name, arg, env)?;
                frozen.extend(f);
                binding
            };
            inner = inner.bind(&p.name, binding);
        }
        let saved = self.depth;
        self.enter();
        let result = self.elab(body, &inner);
        self.depth = saved;
        let mut term = result?;
        for (var, e) in frozen.into_iter().rev() {
            term = Self::close(term, &var, e);
        }
        Ok(term)
    }
}
