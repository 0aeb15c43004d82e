//! Pretty-printing of the surface syntax. Output re-parses to the same
//! tree (up to source positions).

use alloc::string::String;
use core::fmt::{self, Write};

use super::ast::*;
use crate::formula::NextKind;

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for item in &p.items {
        let _ = writeln!(out, "{}", item);
    }
    out
}

impl fmt::Display for TopLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopLevel::Let(b) => {
                f.write_str("let ")?;
                if b.lazy {
                    f.write_str("~")?;
                }
                f.write_str(&b.name)?;
                if let Some(params) = &b.params {
                    f.write_str("(")?;
                    for (i, p) in params.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        if p.lazy {
                            f.write_str("~")?;
                        }
                        f.write_str(&p.name)?;
                    }
                    f.write_str(")")?;
                }
                write!(f, " = {};", b.body)
            }
            TopLevel::Action(a) => {
                write!(f, "action {} = {}", a.name, a.primitive)?;
                if !a.args.is_empty() {
                    f.write_str("(")?;
                    for (i, arg) in a.args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{}", arg)?;
                    }
                    f.write_str(")")?;
                }
                if let Some(t) = a.timeout {
                    write!(f, " timeout {}", t)?;
                }
                if let Some(g) = &a.guard {
                    write!(f, " when {}", g)?;
                }
                f.write_str(";")
            }
            TopLevel::Check(c) => {
                f.write_str("check")?;
                for p in &c.properties {
                    write!(f, " {}", p)?;
                }
                if let Some(with) = &c.with {
                    f.write_str(" with")?;
                    for w in with {
                        write!(f, " {}", w)?;
                    }
                }
                f.write_str(";")
            }
        }
    }
}

fn is_atomic(a: &Ast) -> bool {
    match &a.kind {
        AstKind::Number(n) => *n >= 0.0,
        AstKind::Str(_)
        | AstKind::Bool(_)
        | AstKind::Null
        | AstKind::Ident(_)
        | AstKind::Selector(_)
        | AstKind::Field(..)
        | AstKind::Call(..)
        | AstKind::Seq(_)
        | AstKind::Map(_) => true,
        _ => false,
    }
}

/// Prints an operand, parenthesized unless it is atomic.
struct Operand<'a>(&'a Ast);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if is_atomic(self.0) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

fn write_str_lit(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

fn subscript(f: &mut fmt::Formatter<'_>, n: Option<u32>) -> fmt::Result {
    match n {
        Some(n) => write!(f, "_{}", n),
        None => Ok(()),
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AstKind::Number(n) => write!(f, "{}", n),
            AstKind::Str(s) => write_str_lit(f, s),
            AstKind::Bool(b) => write!(f, "{}", b),
            AstKind::Null => f.write_str("null"),
            AstKind::Ident(n) => f.write_str(n),
            AstKind::Selector(s) => write!(f, "`{}`", s),
            AstKind::Field(base, name) => write!(f, "{}.{}", Operand(base), name),
            AstKind::Call(name, args) => {
                write!(f, "{}(", name)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                f.write_str(")")
            }
            AstKind::Not(a) => write!(f, "!{}", Operand(a)),
            AstKind::Neg(a) => write!(f, "-{}", Operand(a)),
            AstKind::Binary(op, a, b) => write!(f, "{} {} {}", Operand(a), op.symbol(), Operand(b)),
            AstKind::If(c, t, e) => write!(f, "if {} {{ {} }} else {{ {} }}", c, t, e),
            AstKind::Seq(items) => {
                f.write_str("[")?;
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                f.write_str("]")
            }
            AstKind::Map(entries) => {
                f.write_str("{")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_str_lit(f, k)?;
                    write!(f, ": {}", v)?;
                }
                f.write_str("}")
            }
            AstKind::Let { name, lazy, value, body } => {
                write!(f, "let {}{} = {}; {}", if *lazy { "~" } else { "" }, name, value, body)
            }
            AstKind::Next(kind, a) => {
                let kw = match kind {
                    NextKind::Required => "next",
                    NextKind::Weak => "nextW",
                    NextKind::Strong => "nextS",
                };
                write!(f, "{} {}", kw, Operand(a))
            }
            AstKind::Temporal(op, n, a) => {
                f.write_str(match op {
                    TemporalOp::Always => "always",
                    TemporalOp::Eventually => "eventually",
                })?;
                subscript(f, *n)?;
                write!(f, " {}", Operand(a))
            }
            AstKind::BinaryTemporal(op, n, a, b) => {
                write!(f, "{} ", Operand(a))?;
                f.write_str(match op {
                    BinaryTemporalOp::Until => "until",
                    BinaryTemporalOp::Release => "release",
                })?;
                subscript(f, *n)?;
                write!(f, " {}", Operand(b))
            }
        }
    }
}
