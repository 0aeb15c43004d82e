//! The function/non-function distinction, inferred for every binding.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use super::ast::*;
use crate::expr::Builtin;

/// Events every executor provides without a definition.
pub const BUILTIN_EVENTS: [&str; 1] = ["loaded?"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TypeErrorKind {
    /// A function refers to itself.
    RecursionForbidden,
    /// A function placed in an array or object.
    FunctionInData,
    /// A call with the wrong number of arguments, or a call of a non-function.
    ArityMismatch,
    /// A name that is not defined before its use.
    UnboundName,
    /// A function used where a value is required (compared, passed as an
    /// argument, bound to a name).
    FunctionAsValue,
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeErrorKind::RecursionForbidden => "recursion is not allowed",
            TypeErrorKind::FunctionInData => "functions cannot be stored in arrays or objects",
            TypeErrorKind::ArityMismatch => "wrong number of arguments",
            TypeErrorKind::UnboundName => "unbound name",
            TypeErrorKind::FunctionAsValue => "function used as a value",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{pos}: {kind}: `{name}`")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Value,
    Function(usize),
}

struct Checker<'a> {
    scope: Vec<(&'a str, Kind)>,
    /// Name and function-ness of the top-level binding being checked.
    current: Option<(&'a str, bool)>,
}

pub fn typecheck(program: &Program) -> Result<(), TypeError> {
    let mut c = Checker { scope: Vec::new(), current: None };
    for item in &program.items {
        match item {
            TopLevel::Let(b) => {
                c.current = Some((&b.name, b.params.is_some()));
                let mark = c.scope.len();
                if let Some(params) = &b.params {
                    for p in params {
                        c.scope.push((&p.name, Kind::Value));
                    }
                }
                c.value(&b.body)?;
                c.scope.truncate(mark);
                let kind = match &b.params {
                    Some(p) => Kind::Function(p.len()),
                    None => Kind::Value,
                };
                c.current = None;
                c.scope.push((&b.name, kind));
            }
            TopLevel::Action(a) => {
                c.current = None;
                for arg in &a.args {
                    c.value(arg)?;
                }
                if let Some(g) = &a.guard {
                    c.value(g)?;
                }
                c.scope.push((&a.name, Kind::Value));
            }
            TopLevel::Check(_) => {}
        }
    }
    Ok(())
}

/// Checks a standalone expression, where only builtins and local `let`s
/// are in scope.
pub fn typecheck_expr(ast: &Ast) -> Result<(), TypeError> {
    Checker { scope: Vec::new(), current: None }.value(ast)
}

fn err<T>(kind: TypeErrorKind, name: &str, pos: Pos) -> Result<T, TypeError> {
    Err(TypeError { kind, name: name.to_string(), pos })
}

impl<'a> Checker<'a> {
    fn lookup(&self, name: &str) -> Option<Kind> {
        self.scope.iter().rev().find(|(n, _)| *n == name).map(|(_, k)| *k)
    }

    fn self_reference(&self, name: &str, pos: Pos) -> Result<(), TypeError> {
        match self.current {
            Some((cur, is_fn)) if cur == name && self.lookup(name).is_none() => {
                if is_fn {
                    err(TypeErrorKind::RecursionForbidden, name, pos)
                } else {
                    err(TypeErrorKind::UnboundName, name, pos)
                }
            }
            _ => Ok(()),
        }
    }

    fn value(&mut self, ast: &'a Ast) -> Result<(), TypeError> {
        if let Kind::Function(_) = self.kind(ast)? {
            let name = match &ast.kind {
                AstKind::Ident(n) => n.as_str(),
                _ => "",
            };
            return err(TypeErrorKind::FunctionAsValue, name, ast.pos);
        }
        Ok(())
    }

    fn kind(&mut self, ast: &'a Ast) -> Result<Kind, TypeError> {
        match &ast.kind {
            AstKind::Number(_)
            | AstKind::Str(_)
            | AstKind::Bool(_)
            | AstKind::Null
            | AstKind::Selector(_) => Ok(Kind::Value),
            AstKind::Ident(n) if n == "happened" => Ok(Kind::Value),
            AstKind::Ident(n) => {
                self.self_reference(n, ast.pos)?;
                match self.lookup(n) {
                    Some(k) => Ok(k),
                    None if BUILTIN_EVENTS.contains(&n.as_str()) => Ok(Kind::Value),
                    None if Builtin::lookup(n).is_some() => Ok(Kind::Function(1)),
                    None => err(TypeErrorKind::UnboundName, n, ast.pos),
                }
            }
            AstKind::Call(name, args) => {
                self.self_reference(name, ast.pos)?;
                let arity = match self.lookup(name) {
                    Some(Kind::Function(n)) => n,
                    Some(Kind::Value) => return err(TypeErrorKind::ArityMismatch, name, ast.pos),
                    None => match Builtin::lookup(name) {
                        Some(b) => b.arity(),
                        None => return err(TypeErrorKind::UnboundName, name, ast.pos),
                    },
                };
                if arity != args.len() {
                    return err(TypeErrorKind::ArityMismatch, name, ast.pos);
                }
                for a in args {
                    self.value(a)?;
                }
                Ok(Kind::Value)
            }
            AstKind::Seq(items) => {
                for i in items {
                    self.data(i)?;
                }
                Ok(Kind::Value)
            }
            AstKind::Map(entries) => {
                for (_, i) in entries {
                    self.data(i)?;
                }
                Ok(Kind::Value)
            }
            AstKind::Let { name, value, body, .. } => {
                self.value(value)?;
                self.scope.push((name, Kind::Value));
                let r = self.value(body);
                self.scope.pop();
                r.map(|_| Kind::Value)
            }
            AstKind::Field(a, _)
            | AstKind::Not(a)
            | AstKind::Neg(a)
            | AstKind::Next(_, a)
            | AstKind::Temporal(_, _, a) => self.value(a).map(|_| Kind::Value),
            AstKind::Binary(_, a, b) | AstKind::BinaryTemporal(_, _, a, b) => {
                self.value(a)?;
                self.value(b).map(|_| Kind::Value)
            }
            AstKind::If(c, t, e) => {
                self.value(c)?;
                self.value(t)?;
                self.value(e).map(|_| Kind::Value)
            }
        }
    }

    fn data(&mut self, ast: &'a Ast) -> Result<(), TypeError> {
        if let Kind::Function(_) = self.kind(ast)? {
            let name = match &ast.kind {
                AstKind::Ident(n) => n.as_str(),
                _ => "",
            };
            return err(TypeErrorKind::FunctionInData, name, ast.pos);
        }
        Ok(())
    }
}
