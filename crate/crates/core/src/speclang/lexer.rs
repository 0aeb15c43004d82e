use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::ast::Pos;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    /// Identifiers and keywords. May end in `!` or `?`.
    Ident(String),
    Number(f64),
    Str(String),
    Selector(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::Number(n) => write!(f, "number {}", n),
            Tok::Str(s) => write!(f, "string {:?}", s),
            Tok::Selector(s) => write!(f, "selector `{}`", s),
            Tok::Sym(s) => write!(f, "`{}`", s),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const SYMBOLS: [&str; 26] = [
    "==>", "==", "!=", "<=", ">=", "&&", "||", "<", ">", "+", "-", "*", "/", "!", "~", "=", "(", ")", "{", "}",
    "[", "]", ",", ";", ":", ".",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    let err = |line, col, expected: &str, found: String| SyntaxError {
        line,
        col,
        expected: vec![expected.to_string()],
        found,
    };

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == '!' || chars[i] == '?') && chars.get(i + 1) != Some(&'=') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            out.push(Token { tok: Tok::Ident(word), pos });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            let n = text.parse::<f64>().map_err(|_| err(pos.line, pos.col, "number", text.clone()))?;
            out.push(Token { tok: Tok::Number(n), pos });
            continue;
        }
        if c == '"' || c == '`' {
            let (closing, what) = if c == '"' { ('"', "closing `\"`") } else { ('`', "closing backtick") };
            i += 1;
            col += 1;
            let mut text = String::new();
            loop {
                let Some(&d) = chars.get(i) else {
                    return Err(err(line, col, what, "end of input".to_string()));
                };
                if d == '\n' {
                    return Err(err(line, col, what, "end of line".to_string()));
                }
                i += 1;
                col += 1;
                if d == closing {
                    break;
                }
                if d == '\\' && c == '"' {
                    let Some(&e) = chars.get(i) else {
                        return Err(err(line, col, "escape sequence", "end of input".to_string()));
                    };
                    i += 1;
                    col += 1;
                    text.push(match e {
                        'n' => '\n',
                        't' => '\t',
                        '\\' => '\\',
                        '"' => '"',
                        other => return Err(err(line, col - 1, "escape sequence", other.to_string())),
                    });
                } else {
                    text.push(d);
                }
            }
            let tok = if c == '"' { Tok::Str(text) } else { Tok::Selector(text) };
            out.push(Token { tok, pos });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                i += sym.len();
                col += sym.len() as u32;
                out.push(Token { tok: Tok::Sym(sym), pos });
            }
            None => return Err(err(line, col, "token", c.to_string())),
        }
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn action_names_keep_suffix() {
        assert_eq!(
            toks("start! in happened"),
            vec![Tok::Ident("start!".into()), Tok::Ident("in".into()), Tok::Ident("happened".into()), Tok::Eof]
        );
        assert_eq!(toks("a!=b"), vec![Tok::Ident("a".into()), Tok::Sym("!="), Tok::Ident("b".into()), Tok::Eof]);
        assert_eq!(toks("click!(`#t`)")[0], Tok::Ident("click!".into()));
    }

    #[test]
    fn positions_and_comments() {
        let t = tokenize("// hi\n  let ~x").unwrap();
        assert_eq!(t[0].pos, Pos { line: 2, col: 3 });
        assert_eq!(t[1].tok, Tok::Sym("~"));
        assert_eq!(t[1].pos, Pos { line: 2, col: 7 });
    }

    #[test]
    fn literals() {
        assert_eq!(toks("1.5 \"a\\\"b\" `#x`"), vec![
            Tok::Number(1.5),
            Tok::Str("a\"b".into()),
            Tok::Selector("#x".into()),
            Tok::Eof
        ]);
        assert_eq!(toks("x ==> y")[1], Tok::Sym("==>"));
    }

    #[test]
    fn unterminated_string() {
        let e = tokenize("let x = \"abc").unwrap_err();
        assert_eq!((e.line, e.col), (1, 13));
    }
}
