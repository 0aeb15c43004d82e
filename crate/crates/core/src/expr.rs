//! State-dependent, non-temporal expressions and their evaluation.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::StateView;
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    In,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::In => "in",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Builtin {
    ParseInt,
    ParseFloat,
    Length,
    Not,
    ToString,
}

impl Builtin {
    pub fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "parseInt" => Builtin::ParseInt,
            "parseFloat" => Builtin::ParseFloat,
            "length" => Builtin::Length,
            "not" => Builtin::Not,
            "toString" => Builtin::ToString,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::ParseInt => "parseInt",
            Builtin::ParseFloat => "parseFloat",
            Builtin::Length => "length",
            Builtin::Not => "not",
            Builtin::ToString => "toString",
        }
    }

    pub fn arity(self) -> usize {
        1
    }
}

/// An elaborated expression: closed over everything except freeze-bound
/// variables and the state it is evaluated in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Literal(Value),
    /// State field, keyed `selector.field`.
    Field(String),
    /// A bare selector used as a value (e.g. an action argument).
    Selector(String),
    /// Name of an action or event, such as `start!`.
    Action(String),
    /// The reserved `happened` variable.
    Happened,
    Var(String),
    Builtin(Builtin, Vec<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Seq(Vec<Expr>),
    Map(Vec<(String, Expr)>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("atom `{atom}` evaluated to a {found}, expected a boolean")]
    AtomNotBoolean { atom: String, found: &'static str },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("formula grew to {size} nodes, over the limit of {limit}")]
    FormulaTooLarge { size: usize, limit: usize },
}

impl Expr {
    pub fn field(key: impl Into<String>) -> Self {
        Expr::Field(key.into())
    }

    pub fn lit(v: impl Into<Value>) -> Self {
        Expr::Literal(v.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn eq(lhs: Expr, rhs: Expr) -> Self {
        Expr::binary(BinOp::Eq, lhs, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Self {
        Expr::Unary(UnOp::Not, Box::new(e))
    }

    pub fn eval<S: StateView + ?Sized>(&self, state: &S) -> Result<Value, EvalError> {
        match self {
            Expr::Literal(v) => Ok(v.clone()),
            Expr::Field(key) => state
                .field(key)
                .cloned()
                .ok_or_else(|| EvalError::UnknownField(key.clone())),
            Expr::Selector(sel) => Ok(Value::String(sel.clone())),
            Expr::Action(name) => Ok(Value::String(name.clone())),
            Expr::Happened => Ok(Value::Seq(
                state.happened().iter().map(|h| Value::String(h.clone())).collect(),
            )),
            Expr::Var(name) => Err(EvalError::UnboundVariable(name.clone())),
            Expr::Builtin(b, args) => {
                if args.len() != b.arity() {
                    return Err(EvalError::Type(format!("{} expects {} argument(s)", b.name(), b.arity())));
                }
                let arg = args[0].eval(state)?;
                apply_builtin(*b, arg)
            }
            Expr::Unary(op, e) => {
                let v = e.eval(state)?;
                match (op, v) {
                    (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                    (UnOp::Neg, Value::Number(n)) => Ok(Value::Number(-n)),
                    (UnOp::Not, v) => Err(EvalError::Type(format!("`!` applied to a {}", v.type_name()))),
                    (UnOp::Neg, v) => Err(EvalError::Type(format!("unary `-` applied to a {}", v.type_name()))),
                }
            }
            Expr::Binary(BinOp::And, l, r) => {
                if expect_bool(l.eval(state)?, "&&")? {
                    Ok(Value::Bool(expect_bool(r.eval(state)?, "&&")?))
                } else {
                    Ok(Value::Bool(false))
                }
            }
            Expr::Binary(BinOp::Or, l, r) => {
                if expect_bool(l.eval(state)?, "||")? {
                    Ok(Value::Bool(true))
                } else {
                    Ok(Value::Bool(expect_bool(r.eval(state)?, "||")?))
                }
            }
            Expr::Binary(op, l, r) => {
                let lv = l.eval(state)?;
                let rv = r.eval(state)?;
                apply_binop(*op, lv, rv)
            }
            Expr::If(c, t, e) => {
                if expect_bool(c.eval(state)?, "if")? {
                    t.eval(state)
                } else {
                    e.eval(state)
                }
            }
            Expr::Seq(items) => Ok(Value::Seq(items.iter().map(|i| i.eval(state)).collect::<Result<_, _>>()?)),
            Expr::Map(entries) => {
                let mut map = BTreeMap::new();
                for (k, e) in entries {
                    map.insert(k.clone(), e.eval(state)?);
                }
                Ok(Value::Map(map))
            }
        }
    }

    /// Evaluates in formula position, where only booleans are allowed.
    pub fn eval_bool<S: StateView + ?Sized>(&self, state: &S) -> Result<bool, EvalError> {
        match self.eval(state)? {
            Value::Bool(b) => Ok(b),
            other => Err(EvalError::AtomNotBoolean { atom: self.to_string(), found: other.type_name() }),
        }
    }

    /// Replaces free occurrences of `name` by a constant.
    pub fn substitute(&self, name: &str, value: &Value) -> Expr {
        self.replace_var(name, &Expr::Literal(value.clone()))
    }

    /// Replaces free occurrences of `name` by an expression.
    pub fn replace_var(&self, name: &str, with: &Expr) -> Expr {
        let sub = |e: &Expr| e.replace_var(name, with);
        match self {
            Expr::Var(v) if v == name => with.clone(),
            Expr::Literal(_)
            | Expr::Field(_)
            | Expr::Selector(_)
            | Expr::Action(_)
            | Expr::Happened
            | Expr::Var(_) => self.clone(),
            Expr::Builtin(b, args) => Expr::Builtin(*b, args.iter().map(sub).collect()),
            Expr::Unary(op, e) => Expr::Unary(*op, Box::new(sub(e))),
            Expr::Binary(op, l, r) => Expr::binary(*op, sub(l), sub(r)),
            Expr::If(c, t, e) => Expr::If(Box::new(sub(c)), Box::new(sub(t)), Box::new(sub(e))),
            Expr::Seq(items) => Expr::Seq(items.iter().map(sub).collect()),
            Expr::Map(entries) => Expr::Map(entries.iter().map(|(k, e)| (k.clone(), sub(e))).collect()),
        }
    }

    /// Every state field syntactically reachable from this expression,
    /// including both branches of conditionals.
    pub fn collect_fields(&self, out: &mut BTreeSet<String>) {
        self.walk(&mut |e| {
            if let Expr::Field(k) = e {
                out.insert(k.clone());
            }
        });
    }

    pub fn mentions_var(&self, name: &str) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if matches!(e, Expr::Var(v) if v == name) {
                found = true;
            }
        });
        found
    }

    /// True when evaluation reads the state (fields or `happened`).
    pub fn reads_state(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if matches!(e, Expr::Field(_) | Expr::Happened) {
                found = true;
            }
        });
        found
    }

    pub fn is_closed(&self) -> bool {
        let mut closed = true;
        self.walk(&mut |e| {
            if matches!(e, Expr::Var(_)) {
                closed = false;
            }
        });
        closed
    }

    pub fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Literal(_) | Expr::Field(_) | Expr::Selector(_) | Expr::Action(_) | Expr::Happened | Expr::Var(_) => {}
            Expr::Builtin(_, args) | Expr::Seq(args) => args.iter().for_each(|a| a.walk(f)),
            Expr::Unary(_, e) => e.walk(f),
            Expr::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            Expr::If(c, t, e) => {
                c.walk(f);
                t.walk(f);
                e.walk(f);
            }
            Expr::Map(entries) => entries.iter().for_each(|(_, e)| e.walk(f)),
        }
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

fn expect_bool(v: Value, ctx: &str) -> Result<bool, EvalError> {
    match v {
        Value::Bool(b) => Ok(b),
        other => Err(EvalError::Type(format!("`{}` expects booleans, got a {}", ctx, other.type_name()))),
    }
}

fn concat_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn apply_binop(op: BinOp, lv: Value, rv: Value) -> Result<Value, EvalError> {
    use Value::*;
    let type_err = |lv: &Value, rv: &Value| {
        EvalError::Type(format!("`{}` is not defined on {} and {}", op.symbol(), lv.type_name(), rv.type_name()))
    };
    Ok(match op {
        BinOp::Eq => Bool(lv == rv),
        BinOp::Ne => Bool(lv != rv),
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            let ord = match (&lv, &rv) {
                (Number(a), Number(b)) => a.partial_cmp(b),
                (String(a), String(b)) => Some(a.cmp(b)),
                _ => return Err(type_err(&lv, &rv)),
            };
            let Some(ord) = ord else { return Ok(Bool(false)) };
            Bool(match op {
                BinOp::Lt => ord.is_lt(),
                BinOp::Le => ord.is_le(),
                BinOp::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            })
        }
        BinOp::Add => match (&lv, &rv) {
            (Number(a), Number(b)) => Number(a + b),
            (String(_), _) | (_, String(_)) => {
                let mut s = concat_text(&lv);
                s.push_str(&concat_text(&rv));
                String(s)
            }
            (Seq(a), Seq(b)) => Seq(a.iter().chain(b.iter()).cloned().collect()),
            _ => return Err(type_err(&lv, &rv)),
        },
        BinOp::Sub | BinOp::Mul | BinOp::Div => match (&lv, &rv) {
            (Number(a), Number(b)) => match op {
                BinOp::Sub => Number(a - b),
                BinOp::Mul => Number(a * b),
                _ => {
                    if *b == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    Number(a / b)
                }
            },
            _ => return Err(type_err(&lv, &rv)),
        },
        BinOp::In => match (&lv, &rv) {
            (_, Seq(items)) => Bool(items.contains(&lv)),
            (String(k), Map(m)) => Bool(m.contains_key(k)),
            (String(needle), String(hay)) => Bool(hay.contains(needle.as_str())),
            _ => return Err(type_err(&lv, &rv)),
        },
        BinOp::And | BinOp::Or => unreachable!("short-circuit operators are evaluated lazily"),
    })
}

/// Leading-integer parse in the JavaScript `parseInt` style; `null` when no
/// digits are present.
fn parse_int(s: &str) -> Value {
    let t = s.trim_start();
    let (neg, digits) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let end = digits.bytes().take_while(u8::is_ascii_digit).count();
    if end == 0 {
        return Value::Null;
    }
    match digits[..end].parse::<f64>() {
        Ok(n) => Value::Number(if neg { -n } else { n }),
        Err(_) => Value::Null,
    }
}

fn parse_float(s: &str) -> Value {
    let t = s.trim();
    // longest prefix that parses
    let mut best = Value::Null;
    for end in (1..=t.len()).rev() {
        if !t.is_char_boundary(end) {
            continue;
        }
        let prefix = &t[..end];
        if prefix.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
            continue;
        }
        if let Ok(n) = prefix.parse::<f64>() {
            if n.is_finite() {
                best = Value::Number(n);
                break;
            }
        }
    }
    best
}

fn apply_builtin(b: Builtin, arg: Value) -> Result<Value, EvalError> {
    Ok(match (b, arg) {
        (Builtin::ParseInt, Value::String(s)) => parse_int(&s),
        (Builtin::ParseInt, Value::Number(n)) => parse_int(&Value::Number(n).to_string()),
        (Builtin::ParseFloat, Value::String(s)) => parse_float(&s),
        (Builtin::ParseFloat, Value::Number(n)) => Value::Number(n),
        (Builtin::ParseInt | Builtin::ParseFloat, Value::Null) => Value::Null,
        (Builtin::Length, Value::String(s)) => Value::Number(s.chars().count() as f64),
        (Builtin::Length, Value::Seq(items)) => Value::Number(items.len() as f64),
        (Builtin::Length, Value::Map(m)) => Value::Number(m.len() as f64),
        (Builtin::Not, Value::Bool(x)) => Value::Bool(!x),
        (Builtin::ToString, Value::String(s)) => Value::String(s),
        (Builtin::ToString, v) => Value::String(v.to_string()),
        (b, v) => return Err(EvalError::Type(format!("{} is not defined on a {}", b.name(), v.type_name()))),
    })
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::If(..) => 0,
        Expr::Binary(BinOp::Or, ..) => 1,
        Expr::Binary(BinOp::And, ..) => 2,
        Expr::Binary(BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::In, ..) => 3,
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 4,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 5,
        Expr::Unary(..) => 6,
        _ => 7,
    }
}

struct Paren<'a>(&'a Expr, u8);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if precedence(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Splits a field key into selector and field name at the last dot.
pub fn split_field_key(key: &str) -> (&str, &str) {
    match key.rfind('.') {
        Some(i) if i > 0 => (&key[..i], &key[i + 1..]),
        _ => (key, ""),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(v) => write!(f, "{}", v),
            Expr::Field(key) => {
                let (sel, field) = split_field_key(key);
                write!(f, "`{}`.{}", sel, field)
            }
            Expr::Selector(sel) => write!(f, "`{}`", sel),
            Expr::Action(name) => f.write_str(name),
            Expr::Happened => f.write_str("happened"),
            Expr::Var(name) => f.write_str(name),
            Expr::Builtin(b, args) => {
                write!(f, "{}(", b.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                f.write_str(")")
            }
            Expr::Unary(UnOp::Not, e) => write!(f, "!{}", Paren(e, 6)),
            Expr::Unary(UnOp::Neg, e) => write!(f, "-{}", Paren(e, 6)),
            Expr::Binary(op, l, r) => {
                let p = precedence(self);
                write!(f, "{} {} {}", Paren(l, p), op.symbol(), Paren(r, p + 1))
            }
            Expr::If(c, t, e) => write!(f, "if {} {{ {} }} else {{ {} }}", c, t, e),
            Expr::Seq(items) => {
                f.write_str("[")?;
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                f.write_str("]")
            }
            Expr::Map(entries) => {
                f.write_str("{")?;
                for (i, (k, e)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}: {}", Value::String(k.clone()), e)?;
                }
                f.write_str("}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::State;

    fn st() -> State {
        State::new().with_field("#remaining.text", "180").with_field("#toggle.text", "start").with_happened(["start!"])
    }

    #[test]
    fn parse_int_of_text_field() {
        let e = Expr::Builtin(Builtin::ParseInt, alloc::vec![Expr::field("#remaining.text")]);
        assert_eq!(e.eval(&st()).unwrap(), Value::Number(180.0));
        assert_eq!(parse_int("12px"), Value::Number(12.0));
        assert_eq!(parse_int("  -7"), Value::Number(-7.0));
        assert_eq!(parse_int("abc"), Value::Null);
    }

    #[test]
    fn membership_in_happened() {
        let e = Expr::binary(BinOp::In, Expr::Action("start!".into()), Expr::Happened);
        assert_eq!(e.eval_bool(&st()), Ok(true));
        let e = Expr::binary(BinOp::In, Expr::Action("stop!".into()), Expr::Happened);
        assert_eq!(e.eval_bool(&st()), Ok(false));
    }

    #[test]
    fn unknown_field_and_non_boolean_atoms_are_errors() {
        assert_eq!(Expr::field("#nope.text").eval(&st()), Err(EvalError::UnknownField("#nope.text".into())));
        assert!(matches!(
            Expr::field("#toggle.text").eval_bool(&st()),
            Err(EvalError::AtomNotBoolean { found: "string", .. })
        ));
    }

    #[test]
    fn no_truthiness_in_logic() {
        let e = Expr::binary(BinOp::And, Expr::lit(1_i64), Expr::lit(true));
        assert!(matches!(e.eval(&st()), Err(EvalError::Type(_))));
    }

    #[test]
    fn arithmetic_and_concat() {
        let e = Expr::binary(BinOp::Add, Expr::lit("n="), Expr::lit(4_i64));
        assert_eq!(e.eval(&st()).unwrap(), Value::from("n=4"));
        let e = Expr::binary(BinOp::Div, Expr::lit(1_i64), Expr::lit(0_i64));
        assert_eq!(e.eval(&st()), Err(EvalError::DivisionByZero));
        let e = Expr::Builtin(Builtin::ToString, alloc::vec![Expr::lit(179_i64)]);
        assert_eq!(e.eval(&st()).unwrap(), Value::from("179"));
    }

    #[test]
    fn substitution_closes_variables() {
        let e = Expr::eq(Expr::field("#remaining.text"), Expr::var("v"));
        assert!(!e.is_closed());
        let closed = e.substitute("v", &Value::from("180"));
        assert!(closed.is_closed());
        assert_eq!(closed.eval_bool(&st()), Ok(true));
    }

    #[test]
    fn display_round_trips_precedence() {
        let e = Expr::binary(
            BinOp::Mul,
            Expr::binary(BinOp::Add, Expr::lit(1_i64), Expr::lit(2_i64)),
            Expr::field("#a.b"),
        );
        assert_eq!(e.to_string(), "(1 + 2) * `#a`.b");
    }
}
