//! Surface syntax tree, as produced by the parser.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Program {
    pub items: Vec<TopLevel>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "item")]
pub enum TopLevel {
    Let(LetBinding),
    Action(ActionDef),
    Check(CheckStmt),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LetBinding {
    pub name: String,
    pub lazy: bool,
    /// `None` for plain bindings, `Some` (possibly empty) for functions.
    pub params: Option<Vec<Param>>,
    pub body: Ast,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Param {
    pub name: String,
    pub lazy: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ActionKind {
    /// Named with a trailing `!`, performed by the checker.
    User,
    /// Named with a trailing `?`, initiated by the system under test.
    Event,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionDef {
    pub name: String,
    pub kind: ActionKind,
    /// Primitive name including its `!`/`?` suffix, e.g. `click!`.
    pub primitive: String,
    pub args: Vec<Ast>,
    pub guard: Option<Ast>,
    /// Milliseconds.
    pub timeout: Option<u64>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckStmt {
    pub properties: Vec<String>,
    pub with: Option<Vec<String>>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ast {
    pub kind: AstKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SurfaceBinOp {
    Implies,
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    Add,
    Sub,
    Mul,
    Div,
}

impl SurfaceBinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            SurfaceBinOp::Implies => "==>",
            SurfaceBinOp::Or => "||",
            SurfaceBinOp::And => "&&",
            SurfaceBinOp::Eq => "==",
            SurfaceBinOp::Ne => "!=",
            SurfaceBinOp::Lt => "<",
            SurfaceBinOp::Le => "<=",
            SurfaceBinOp::Gt => ">",
            SurfaceBinOp::Ge => ">=",
            SurfaceBinOp::In => "in",
            SurfaceBinOp::Add => "+",
            SurfaceBinOp::Sub => "-",
            SurfaceBinOp::Mul => "*",
            SurfaceBinOp::Div => "/",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            SurfaceBinOp::Implies => 1,
            SurfaceBinOp::Or => 2,
            SurfaceBinOp::And => 3,
            SurfaceBinOp::Eq
            | SurfaceBinOp::Ne
            | SurfaceBinOp::Lt
            | SurfaceBinOp::Le
            | SurfaceBinOp::Gt
            | SurfaceBinOp::Ge
            | SurfaceBinOp::In => 5,
            SurfaceBinOp::Add | SurfaceBinOp::Sub => 6,
            SurfaceBinOp::Mul | SurfaceBinOp::Div => 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TemporalOp {
    Always,
    Eventually,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinaryTemporalOp {
    Until,
    Release,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum AstKind {
    Number(f64),
    Str(String),
    Bool(bool),
    Null,
    Ident(String),
    /// Backtick-quoted selector.
    Selector(String),
    /// `.name` projection.
    Field(Box<Ast>, String),
    Call(String, Vec<Ast>),
    Not(Box<Ast>),
    Neg(Box<Ast>),
    Binary(SurfaceBinOp, Box<Ast>, Box<Ast>),
    If(Box<Ast>, Box<Ast>, Box<Ast>),
    Seq(Vec<Ast>),
    Map(Vec<(String, Ast)>),
    /// `let [~]name = value; body`
    Let { name: String, lazy: bool, value: Box<Ast>, body: Box<Ast> },
    Next(crate::formula::NextKind, Box<Ast>),
    Temporal(TemporalOp, Option<u32>, Box<Ast>),
    BinaryTemporal(BinaryTemporalOp, Option<u32>, Box<Ast>, Box<Ast>),
}

impl Ast {
    pub fn new(kind: AstKind, pos: Pos) -> Self {
        Ast { kind, pos }
    }

    /// Calls `f` on this node and every descendant.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Ast)) {
        f(self);
        match &self.kind {
            AstKind::Number(_)
            | AstKind::Str(_)
            | AstKind::Bool(_)
            | AstKind::Null
            | AstKind::Ident(_)
            | AstKind::Selector(_) => {}
            AstKind::Field(a, _)
            | AstKind::Not(a)
            | AstKind::Neg(a)
            | AstKind::Next(_, a)
            | AstKind::Temporal(_, _, a) => a.walk(f),
            AstKind::Call(_, args) | AstKind::Seq(args) => args.iter().for_each(|a| a.walk(f)),
            AstKind::Binary(_, a, b) | AstKind::BinaryTemporal(_, _, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            AstKind::If(c, t, e) => {
                c.walk(f);
                t.walk(f);
                e.walk(f);
            }
            AstKind::Map(entries) => entries.iter().for_each(|(_, a)| a.walk(f)),
            AstKind::Let { value, body, .. } => {
                value.walk(f);
                body.walk(f);
            }
        }
    }

    fn clear_positions(&mut self) {
        self.pos = Pos::default();
        match &mut self.kind {
            AstKind::Number(_)
            | AstKind::Str(_)
            | AstKind::Bool(_)
            | AstKind::Null
            | AstKind::Ident(_)
            | AstKind::Selector(_) => {}
            AstKind::Field(a, _)
            | AstKind::Not(a)
            | AstKind::Neg(a)
            | AstKind::Next(_, a)
            | AstKind::Temporal(_, _, a) => a.clear_positions(),
            AstKind::Call(_, args) | AstKind::Seq(args) => args.iter_mut().for_each(Ast::clear_positions),
            AstKind::Binary(_, a, b) | AstKind::BinaryTemporal(_, _, a, b) => {
                a.clear_positions();
                b.clear_positions();
            }
            AstKind::If(c, t, e) => {
                c.clear_positions();
                t.clear_positions();
                e.clear_positions();
            }
            AstKind::Map(entries) => entries.iter_mut().for_each(|(_, a)| a.clear_positions()),
            AstKind::Let { value, body, .. } => {
                value.clear_positions();
                body.clear_positions();
            }
        }
    }
}

impl Program {
    /// Zeroes every source position, so that trees parsed from differently
    /// laid out sources can be compared.
    pub fn clear_positions(&mut self) {
        for item in &mut self.items {
            match item {
                TopLevel::Let(b) => {
                    b.pos = Pos::default();
                    b.body.clear_positions();
                }
                TopLevel::Action(a) => {
                    a.pos = Pos::default();
                    a.args.iter_mut().for_each(Ast::clear_positions);
                    if let Some(g) = &mut a.guard {
                        g.clear_positions();
                    }
                }
                TopLevel::Check(c) => c.pos = Pos::default(),
            }
        }
    }
}
