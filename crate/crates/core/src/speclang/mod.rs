//! The specification language: a small, terminating, JavaScript-flavoured
//! language for temporal properties, actions and events.

pub mod ast;
mod deps;
mod elaborate;
mod lexer;
mod parser;
mod printer;
mod typecheck;

use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::Expr;

pub use deps::analyze_deps;
pub use elaborate::{elaborate, elaborate_expr, Action, CheckConfig, ElaboratedSpec, ElaborationError};
pub use parser::{is_reserved, parse, parse_expr};
pub use printer::print_program;
pub use typecheck::{typecheck, typecheck_expr, TypeError, TypeErrorKind, BUILTIN_EVENTS};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{line}:{col}: expected {}, found {found}", .expected.join(" or "))]
pub struct SyntaxError {
    pub line: u32,
    pub col: u32,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("{0}")]
    Elaboration(#[from] ElaborationError),
}

/// Parses, typechecks and elaborates a specification.
pub fn compile(source: &str, default_subscript: u32) -> Result<ElaboratedSpec, SpecError> {
    let program = parse(source)?;
    Ok(elaborate(&program, default_subscript)?)
}

/// Compiles a standalone expression, e.g. a guard or effect in a model file.
pub fn compile_expr(source: &str) -> Result<Expr, SpecError> {
    let ast = parse_expr(source)?;
    Ok(elaborate_expr(&ast)?)
}
