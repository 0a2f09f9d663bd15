//! Recursive-descent parser for the concrete syntax.
//!
//! ```text
//! formula := implies [ "iff" implies ]
//! implies := or [ "implies" implies ]
//! or      := and { "or" and }
//! and     := unary { "and" unary }
//! unary   := "not" unary | ("forall" | "exists") var ":" unary | primary
//! primary := "verum" | "falsum" | ("set" | "slim" | "fund") "(" term ")"
//!          | "(" formula ")" | term ("in" | "=") term
//! term    := var | "{" var ":" formula "}" | "{|" var ":" formula "|}"
//!          | "{" term "}" | "{" term "," term "}" | "$" name [ "(" term { "," term } ")" ]
//! var     := "x" | "x" digits | "b" digits | "c" digits
//! ```

use std::fmt;

use super::library;
use super::{Formula, Term, Var, BOUND_BASE, CONST_BASE};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Name(String),
    LBrace,
    LBraceBar,
    RBrace,
    BarRBrace,
    LParen,
    RParen,
    Colon,
    Comma,
    Equals,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Name(s) => write!(f, "`${s}`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::LBraceBar => write!(f, "`{{|`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::BarRBrace => write!(f, "`|}}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Equals => write!(f, "`=`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

const KEYWORDS: &[&str] =
    &["in", "not", "and", "or", "implies", "iff", "forall", "exists", "set", "slim", "fund", "verum", "falsum"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'{' if bytes.get(i + 1) == Some(&b'|') => {
                i += 2;
                Tok::LBraceBar
            }
            b'|' if bytes.get(i + 1) == Some(&b'}') => {
                i += 2;
                Tok::BarRBrace
            }
            b'{' => {
                i += 1;
                Tok::LBrace
            }
            b'}' => {
                i += 1;
                Tok::RBrace
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b':' => {
                i += 1;
                Tok::Colon
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'=' => {
                i += 1;
                Tok::Equals
            }
            b'$' => {
                i += 1;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                    i += 1;
                }
                if i == start + 1 {
                    return Err(ParseError { offset: start, message: "expected a name after `$`".into() });
                }
                Tok::Name(text[start + 1..i].to_string())
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                Tok::Ident(text[start..i].to_string())
            }
            _ => {
                return Err(ParseError {
                    offset: start,
                    message: format!("unexpected character `{}`", text[start..].chars().next().unwrap()),
                })
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

fn var_of(ident: &str) -> Option<Var> {
    if ident == "x" {
        return Some(Var::X);
    }
    let (head, digits) = ident.split_at(1);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: u32 = digits.parse().ok()?;
    match head {
        "x" if n > 0 && n < BOUND_BASE => Some(Var(n)),
        "b" if n < CONST_BASE - BOUND_BASE => Some(Var(BOUND_BASE + n)),
        "c" => n.checked_add(CONST_BASE).map(Var),
        _ => None,
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError { offset: self.offset(), message: format!("expected {expected}, found {}", self.peek()) })
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(&tok.to_string())
        }
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        if let Tok::Ident(s) = self.peek() {
            if !KEYWORDS.contains(&s.as_str()) {
                if let Some(v) = var_of(s) {
                    self.bump();
                    return Ok(v);
                }
            }
        }
        self.err("a variable")
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implies()?;
        if self.keyword("iff") {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.keyword("implies") {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.keyword("or") {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.keyword("and") {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.keyword("not") {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        for (kw, is_forall) in [("forall", true), ("exists", false)] {
            if self.keyword(kw) {
                self.bump();
                let v = self.var()?;
                self.expect(Tok::Colon)?;
                let body = self.unary()?;
                return Ok(if is_forall { Formula::forall(v, body) } else { Formula::exists(v, body) });
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        if self.keyword("verum") {
            self.bump();
            return Ok(Formula::Verum);
        }
        if self.keyword("falsum") {
            self.bump();
            return Ok(Formula::Falsum);
        }
        for kw in ["set", "slim", "fund"] {
            if self.keyword(kw) {
                self.bump();
                self.expect(Tok::LParen)?;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                return Ok(match kw {
                    "set" => Formula::Set(t),
                    "slim" => Formula::Slim(t),
                    _ => Formula::Fund(t),
                });
            }
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        let lhs = self.term_or("a formula")?;
        if self.keyword("in") {
            self.bump();
            let rhs = self.term()?;
            return Ok(Formula::Member(lhs, rhs));
        }
        if *self.peek() == Tok::Equals {
            self.bump();
            let rhs = self.term()?;
            return Ok(Formula::Equal(lhs, rhs));
        }
        self.err("`in` or `=`")
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.term_or("a term")
    }

    fn term_or(&mut self, expected: &str) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::LBraceBar => {
                self.bump();
                let v = self.var()?;
                self.expect(Tok::Colon)?;
                let body = self.formula()?;
                self.expect(Tok::BarRBrace)?;
                Ok(Term::restricted(v, body))
            }
            Tok::LBrace => {
                let is_abs = matches!(self.peek_at(1), Tok::Ident(_)) && *self.peek_at(2) == Tok::Colon;
                self.bump();
                if is_abs {
                    let v = self.var()?;
                    self.expect(Tok::Colon)?;
                    let body = self.formula()?;
                    self.expect(Tok::RBrace)?;
                    return Ok(Term::abs(v, body));
                }
                let a = self.term()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                    let b = self.term()?;
                    self.expect(Tok::RBrace)?;
                    return Ok(library::pair(&a, &b));
                }
                self.expect(Tok::RBrace)?;
                Ok(library::singleton(&a))
            }
            Tok::Name(name) => {
                let at = self.offset();
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    args.push(self.term()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen)?;
                }
                library::named_term(&name, &args).ok_or_else(|| ParseError {
                    offset: at,
                    message: format!("unknown named term `${name}` with {} argument(s)", args.len()),
                })
            }
            Tok::Ident(_) => match self.var() {
                Ok(v) => Ok(Term::Var(v)),
                Err(_) => self.err(expected),
            },
            _ => self.err(expected),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.err("end of input")
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}
