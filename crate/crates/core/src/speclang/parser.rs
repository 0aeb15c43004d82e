use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::SyntaxError;
use crate::formula::NextKind;

/// Words that cannot be used as binding names.
pub const KEYWORDS: [&str; 14] = [
    "let", "action", "check", "with", "when", "timeout", "if", "else", "true", "false", "null", "in", "happened",
    "next",
];

pub fn parse(src: &str) -> Result<Program, SyntaxError> {
    let mut p = Parser { toks: tokenize(src)?, i: 0 };
    let mut items = Vec::new();
    while p.peek() != &Tok::Eof {
        items.push(p.item()?);
    }
    Ok(Program { items })
}

/// Parses a single expression spanning the whole input.
pub fn parse_expr(src: &str) -> Result<Ast, SyntaxError> {
    let mut p = Parser { toks: tokenize(src)?, i: 0 };
    let e = p.expr()?;
    if p.peek() != &Tok::Eof {
        return p.error(&["end of input"]);
    }
    Ok(e)
}

/// Recognizes `always`, `always_3`, `eventually_0`, ...
pub fn temporal_keyword(word: &str) -> Option<(Keyword, Option<u32>)> {
    let table = [
        ("always", Keyword::Always),
        ("eventually", Keyword::Eventually),
        ("until", Keyword::Until),
        ("release", Keyword::Release),
    ];
    for (name, kw) in table {
        if word == name {
            return Some((kw, None));
        }
        if let Some(digits) = word.strip_prefix(name).and_then(|r| r.strip_prefix('_')) {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                return digits.parse().ok().map(|n| (kw, Some(n)));
            }
        }
    }
    None
}

fn next_keyword(word: &str) -> Option<NextKind> {
    match word {
        "next" => Some(NextKind::Required),
        "nextW" => Some(NextKind::Weak),
        "nextS" => Some(NextKind::Strong),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Always,
    Eventually,
    Until,
    Release,
}

pub fn is_reserved(word: &str) -> bool {
    KEYWORDS.contains(&word) || next_keyword(word).is_some() || temporal_keyword(word).is_some()
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, SyntaxError> {
        let pos = self.pos();
        Err(SyntaxError {
            line: pos.line,
            col: pos.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.at_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &'static str) -> Result<Pos, SyntaxError> {
        if self.at_sym(s) {
            Ok(self.bump().pos)
        } else {
            let quoted = alloc::format!("`{}`", s);
            self.error(&[quoted.as_str()])
        }
    }

    /// A binding name: an identifier that is not reserved and has no
    /// `!`/`?` suffix.
    fn binder(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Tok::Ident(w) if !is_reserved(w) && !w.ends_with('!') && !w.ends_with('?') => {
                let w = w.clone();
                self.bump();
                Ok(w)
            }
            _ => self.error(&["name"]),
        }
    }

    fn action_name(&mut self, what: &'static str) -> Result<String, SyntaxError> {
        match self.peek() {
            Tok::Ident(w) if w.ends_with('!') || w.ends_with('?') => {
                let w = w.clone();
                self.bump();
                Ok(w)
            }
            _ => self.error(&[what]),
        }
    }

    fn item(&mut self) -> Result<TopLevel, SyntaxError> {
        let pos = self.pos();
        if self.eat_word("let") {
            self.let_item(pos).map(TopLevel::Let)
        } else if self.eat_word("action") {
            self.action_item(pos).map(TopLevel::Action)
        } else if self.eat_word("check") {
            self.check_item(pos).map(TopLevel::Check)
        } else {
            self.error(&["`let`", "`action`", "`check`"])
        }
    }

    fn let_item(&mut self, pos: Pos) -> Result<LetBinding, SyntaxError> {
        let lazy = self.eat_sym("~");
        let name = self.binder()?;
        let params = if self.eat_sym("(") {
            let mut params = Vec::new();
            if !self.at_sym(")") {
                loop {
                    let lazy = self.eat_sym("~");
                    params.push(Param { name: self.binder()?, lazy });
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym(")")?;
            Some(params)
        } else {
            None
        };
        let body = if self.eat_sym("=") {
            let body = self.expr()?;
            self.expect_sym(";")?;
            body
        } else if self.at_sym("{") {
            let body = self.block()?;
            self.eat_sym(";");
            body
        } else if params.is_none() {
            return self.error(&["`=`", "`{`", "`(`"]);
        } else {
            return self.error(&["`=`", "`{`"]);
        };
        Ok(LetBinding { name, lazy, params, body, pos })
    }

    fn action_item(&mut self, pos: Pos) -> Result<ActionDef, SyntaxError> {
        let name = self.action_name("action name ending in `!` or `?`")?;
        let kind = if name.ends_with('!') { ActionKind::User } else { ActionKind::Event };
        self.expect_sym("=")?;
        let primitive = self.action_name("primitive action such as `click!` or `changed?`")?;
        let mut args = Vec::new();
        if self.eat_sym("(") {
            args = self.list(")")?;
        }
        let mut guard = None;
        let mut timeout = None;
        loop {
            if timeout.is_none() && self.eat_word("timeout") {
                match self.peek().clone() {
                    Tok::Number(n) if n >= 0.0 && n == (n as u64) as f64 => {
                        self.bump();
                        timeout = Some(n as u64);
                    }
                    _ => return self.error(&["timeout in milliseconds"]),
                }
            } else if guard.is_none() && self.eat_word("when") {
                guard = Some(self.expr()?);
            } else {
                break;
            }
        }
        if !self.at_sym(";") {
            let mut expected = vec!["`;`"];
            if timeout.is_none() {
                expected.push("`timeout`");
            }
            if guard.is_none() {
                expected.push("`when`");
            }
            return self.error(&expected);
        }
        self.bump();
        Ok(ActionDef { name, kind, primitive, args, guard, timeout, pos })
    }

    fn check_item(&mut self, pos: Pos) -> Result<CheckStmt, SyntaxError> {
        let mut properties = vec![self.binder()?];
        while !self.at_sym(";") && !self.at_word("with") {
            properties.push(self.binder().or_else(|_| self.error(&["property name", "`with`", "`;`"]))?);
        }
        let with = if self.eat_word("with") {
            let mut names = vec![self.action_name("action or event name")?];
            while !self.at_sym(";") {
                names.push(self.action_name("action or event name").or_else(|_| {
                    self.error(&["action or event name", "`;`"])
                })?);
            }
            Some(names)
        } else {
            None
        };
        self.expect_sym(";")?;
        Ok(CheckStmt { properties, with, pos })
    }

    /// Comma separated expressions up to the closing symbol (consumed).
    fn list(&mut self, close: &'static str) -> Result<Vec<Ast>, SyntaxError> {
        let mut items = Vec::new();
        if self.eat_sym(close) {
            return Ok(items);
        }
        loop {
            items.push(self.expr()?);
            if self.eat_sym(close) {
                return Ok(items);
            }
            if !self.eat_sym(",") {
                let quoted = alloc::format!("`{}`", close);
                return self.error(&["`,`", quoted.as_str()]);
            }
        }
    }

    fn block(&mut self) -> Result<Ast, SyntaxError> {
        self.expect_sym("{")?;
        let e = self.expr()?;
        self.expect_sym("}")?;
        Ok(e)
    }

    pub fn expr(&mut self) -> Result<Ast, SyntaxError> {
        self.implies()
    }

    fn implies(&mut self) -> Result<Ast, SyntaxError> {
        let lhs = self.or()?;
        if self.at_sym("==>") {
            let pos = self.bump().pos;
            let rhs = self.implies()?;
            return Ok(Ast::new(AstKind::Binary(SurfaceBinOp::Implies, Box::new(lhs), Box::new(rhs)), pos));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Ast, SyntaxError> {
        let mut lhs = self.and()?;
        while self.at_sym("||") {
            let pos = self.bump().pos;
            let rhs = self.and()?;
            lhs = Ast::new(AstKind::Binary(SurfaceBinOp::Or, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Ast, SyntaxError> {
        let mut lhs = self.temporal_binary()?;
        while self.at_sym("&&") {
            let pos = self.bump().pos;
            let rhs = self.temporal_binary()?;
            lhs = Ast::new(AstKind::Binary(SurfaceBinOp::And, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn temporal_binary(&mut self) -> Result<Ast, SyntaxError> {
        let lhs = self.comparison()?;
        let op = match self.peek() {
            Tok::Ident(w) => match temporal_keyword(w) {
                Some((Keyword::Until, n)) => Some((BinaryTemporalOp::Until, n)),
                Some((Keyword::Release, n)) => Some((BinaryTemporalOp::Release, n)),
                _ => None,
            },
            _ => None,
        };
        if let Some((op, n)) = op {
            let pos = self.bump().pos;
            let rhs = self.temporal_binary()?;
            return Ok(Ast::new(AstKind::BinaryTemporal(op, n, Box::new(lhs), Box::new(rhs)), pos));
        }
        Ok(lhs)
    }

    fn comparison(&mut self) -> Result<Ast, SyntaxError> {
        let mut lhs = self.additive()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("==") => SurfaceBinOp::Eq,
                Tok::Sym("!=") => SurfaceBinOp::Ne,
                Tok::Sym("<") => SurfaceBinOp::Lt,
                Tok::Sym("<=") => SurfaceBinOp::Le,
                Tok::Sym(">") => SurfaceBinOp::Gt,
                Tok::Sym(">=") => SurfaceBinOp::Ge,
                Tok::Ident(w) if w == "in" => SurfaceBinOp::In,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.additive()?;
            lhs = Ast::new(AstKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn additive(&mut self) -> Result<Ast, SyntaxError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => SurfaceBinOp::Add,
                Tok::Sym("-") => SurfaceBinOp::Sub,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.multiplicative()?;
            lhs = Ast::new(AstKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn multiplicative(&mut self) -> Result<Ast, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("*") => SurfaceBinOp::Mul,
                Tok::Sym("/") => SurfaceBinOp::Div,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.unary()?;
            lhs = Ast::new(AstKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn unary(&mut self) -> Result<Ast, SyntaxError> {
        let pos = self.pos();
        if self.eat_sym("!") {
            return Ok(Ast::new(AstKind::Not(Box::new(self.unary()?)), pos));
        }
        if self.eat_sym("-") {
            return Ok(Ast::new(AstKind::Neg(Box::new(self.unary()?)), pos));
        }
        if let Tok::Ident(w) = self.peek() {
            if let Some(kind) = next_keyword(w) {
                self.bump();
                return Ok(Ast::new(AstKind::Next(kind, Box::new(self.unary()?)), pos));
            }
            let op = match temporal_keyword(w) {
                Some((Keyword::Always, n)) => Some((TemporalOp::Always, n)),
                Some((Keyword::Eventually, n)) => Some((TemporalOp::Eventually, n)),
                _ => None,
            };
            if let Some((op, n)) = op {
                self.bump();
                return Ok(Ast::new(AstKind::Temporal(op, n, Box::new(self.unary()?)), pos));
            }
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Ast, SyntaxError> {
        let mut e = self.primary()?;
        while self.at_sym(".") {
            let pos = self.bump().pos;
            let name = match self.peek() {
                Tok::Ident(w) if !w.ends_with('!') && !w.ends_with('?') => w.clone(),
                _ => return self.error(&["field name"]),
            };
            self.bump();
            e = Ast::new(AstKind::Field(Box::new(e), name), pos);
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Ast, SyntaxError> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                AstKind::Number(n)
            }
            Tok::Str(s) => {
                self.bump();
                AstKind::Str(s)
            }
            Tok::Selector(s) => {
                self.bump();
                AstKind::Selector(s)
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                return Ok(e);
            }
            Tok::Sym("[") => {
                self.bump();
                AstKind::Seq(self.list("]")?)
            }
            Tok::Sym("{") => return self.brace(),
            Tok::Ident(w) => match w.as_str() {
                "true" | "false" => {
                    self.bump();
                    AstKind::Bool(w == "true")
                }
                "null" => {
                    self.bump();
                    AstKind::Null
                }
                "if" => return self.if_expr(),
                "let" => return self.let_expr(),
                "happened" => {
                    self.bump();
                    AstKind::Ident(w)
                }
                _ if is_reserved(&w) => return self.error(&["expression"]),
                _ => {
                    self.bump();
                    if self.eat_sym("(") {
                        AstKind::Call(w, self.list(")")?)
                    } else {
                        AstKind::Ident(w)
                    }
                }
            },
            _ => return self.error(&["expression"]),
        };
        Ok(Ast::new(kind, pos))
    }

    /// `{` starts either an object literal or a block.
    fn brace(&mut self) -> Result<Ast, SyntaxError> {
        let is_map = matches!(self.peek_at(1), Tok::Sym("}"))
            || (matches!(self.peek_at(1), Tok::Ident(_) | Tok::Str(_)) && matches!(self.peek_at(2), Tok::Sym(":")));
        if !is_map {
            return self.block();
        }
        let pos = self.bump().pos;
        let mut entries = Vec::new();
        if !self.eat_sym("}") {
            loop {
                let key = match self.peek().clone() {
                    Tok::Ident(w) => w,
                    Tok::Str(s) => s,
                    _ => return self.error(&["object key"]),
                };
                self.bump();
                self.expect_sym(":")?;
                entries.push((key, self.expr()?));
                if self.eat_sym("}") {
                    break;
                }
                if !self.eat_sym(",") {
                    return self.error(&["`,`", "`}`"]);
                }
            }
        }
        Ok(Ast::new(AstKind::Map(entries), pos))
    }

    fn if_expr(&mut self) -> Result<Ast, SyntaxError> {
        let pos = self.bump().pos;
        let cond = self.expr()?;
        let then = self.block()?;
        if !self.eat_word("else") {
            return self.error(&["`else`"]);
        }
        let els = if self.at_word("if") { self.if_expr()? } else { self.block()? };
        Ok(Ast::new(AstKind::If(Box::new(cond), Box::new(then), Box::new(els)), pos))
    }

    fn let_expr(&mut self) -> Result<Ast, SyntaxError> {
        let pos = self.bump().pos;
        let lazy = self.eat_sym("~");
        let name = self.binder()?;
        self.expect_sym("=")?;
        let value = self.expr()?;
        self.expect_sym(";")?;
        let body = self.expr()?;
        Ok(Ast::new(AstKind::Let { name, lazy, value: Box::new(value), body: Box::new(body) }, pos))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(src: &str) -> TopLevel {
        let mut p = parse(src).unwrap();
        p.clear_positions();
        assert_eq!(p.items.len(), 1);
        p.items.remove(0)
    }

    fn ast(kind: AstKind) -> Ast {
        Ast::new(kind, Pos::default())
    }

    #[test]
    fn lazy_binding_with_selector() {
        let item = one("let ~stopped = `#toggle`.text == \"start\";");
        let expected = TopLevel::Let(LetBinding {
            name: "stopped".into(),
            lazy: true,
            params: None,
            body: ast(AstKind::Binary(
                SurfaceBinOp::Eq,
                Box::new(ast(AstKind::Field(Box::new(ast(AstKind::Selector("#toggle".into()))), "text".into()))),
                Box::new(ast(AstKind::Str("start".into()))),
            )),
            pos: Pos::default(),
        });
        assert_eq!(item, expected);
    }

    #[test]
    fn action_with_timeout_and_guard() {
        let item = one("action wait! = noop! timeout 1000 when started;");
        let TopLevel::Action(a) = item else { panic!() };
        assert_eq!(a.name, "wait!");
        assert_eq!(a.kind, ActionKind::User);
        assert_eq!(a.primitive, "noop!");
        assert!(a.args.is_empty());
        assert_eq!(a.timeout, Some(1000));
        assert_eq!(a.guard, Some(ast(AstKind::Ident("started".into()))));
        // either order
        let TopLevel::Action(b) = one("action wait! = noop! when started timeout 1000;") else { panic!() };
        assert_eq!((b.guard, b.timeout), (a.guard, a.timeout));
    }

    #[test]
    fn missing_expression_is_an_error() {
        let e = parse("let x = ;").unwrap_err();
        assert_eq!((e.line, e.col), (1, 9));
        assert_eq!(e.expected, vec!["expression".to_string()]);
        assert_eq!(e.found, "`;`");
    }

    #[test]
    fn temporal_keywords_and_precedence() {
        let TopLevel::Let(b) = one("let ~p = always_3 a && eventually b until_2 c;") else { panic!() };
        let AstKind::Binary(SurfaceBinOp::And, l, r) = b.body.kind else { panic!("{:?}", b.body) };
        assert!(matches!(l.kind, AstKind::Temporal(TemporalOp::Always, Some(3), _)));
        assert!(matches!(r.kind, AstKind::BinaryTemporal(BinaryTemporalOp::Until, Some(2), _, _)));
    }

    #[test]
    fn block_binding_with_local_let() {
        let TopLevel::Let(b) = one("let ~ticking { let old = time; started && nextW (time == old - 1) }") else {
            panic!()
        };
        assert!(b.lazy);
        let AstKind::Let { name, lazy, body, .. } = b.body.kind else { panic!() };
        assert_eq!(name, "old");
        assert!(!lazy);
        assert!(matches!(body.kind, AstKind::Binary(SurfaceBinOp::And, _, _)));
    }

    #[test]
    fn check_statements() {
        let TopLevel::Check(c) = one("check timeUp with start! wait! tick?;") else { panic!() };
        assert_eq!(c.properties, vec!["timeUp".to_string()]);
        assert_eq!(c.with, Some(vec!["start!".into(), "wait!".into(), "tick?".into()]));
        let TopLevel::Check(c) = one("check safety liveness;") else { panic!() };
        assert_eq!(c.properties.len(), 2);
        assert_eq!(c.with, None);
    }

    #[test]
    fn action_names_need_suffix() {
        let e = parse("action start = click!(`#t`);").unwrap_err();
        assert_eq!(e.col, 8);
    }

    #[test]
    fn objects_and_blocks() {
        let TopLevel::Let(b) = one("let m = {a: 1, \"b c\": [1, 2]};") else { panic!() };
        assert!(matches!(b.body.kind, AstKind::Map(ref e) if e.len() == 2));
        let TopLevel::Let(b) = one("let m = if x { 0 } else if y { 1 } else { 2 };") else { panic!() };
        assert!(matches!(b.body.kind, AstKind::If(..)));
    }
}
