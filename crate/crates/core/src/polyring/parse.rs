//! Recursive-descent parser for the polynomial text grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Multiplication must be explicit; `/` only accepts a nonzero constant divisor,
//! which covers rational literals such as `3/4`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{MultiPoly, Rational, SpaceRef};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

struct Lexer;

impl Lexer {
    fn tokenize(text: &str, line: usize) -> Result<Vec<(Tok, usize)>> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Tok::Int(s.parse().expect("digits")), col));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            } else if "+-*/^()".contains(c) {
                out.push((Tok::Sym(c), col));
                i += 1;
            } else {
                return Err(Error::syntax(
                    line,
                    col,
                    format!("unexpected character `{c}`"),
                ));
            }
        }
        Ok(out)
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    space: &'a SpaceRef,
    line: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::syntax(self.line, self.col(), msg))
    }

    fn peek_sym(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some((Tok::Sym(c), _)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_sym() {
            self.pos += 1;
            let col = self.col();
            let rhs = self.unary()?;
            if op == '*' {
                acc = &acc * &rhs;
            } else {
                if !rhs.is_constant() || rhs.is_zero() {
                    return Err(Error::syntax(
                        self.line,
                        col,
                        "divisor must be a nonzero constant",
                    ));
                }
                let inv = Rational::from_integer(1.into()) / rhs.constant_term();
                acc = acc.scale(&inv);
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        match self.peek_sym() {
            Some('-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek_sym() == Some('^') {
            self.pos += 1;
            match self.toks.get(self.pos) {
                Some((Tok::Int(n), _)) => {
                    let e: u32 = match n.try_into() {
                        Ok(e) => e,
                        Err(_) => return self.err("exponent too large"),
                    };
                    self.pos += 1;
                    if self.peek_sym() == Some('^') {
                        return self.err("chained exponents are not allowed");
                    }
                    Ok(base.pow(e))
                }
                _ => self.err("exponent must be a nonnegative integer"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let Some((tok, col)) = self.toks.get(self.pos).cloned() else {
            return self.err("unexpected end of input");
        };
        match tok {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(MultiPoly::constant(self.space, Rational::from_integer(n)))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                match self.space.index_of(&name) {
                    Ok(i) => Ok(MultiPoly::var(self.space, i)),
                    Err(_) => Err(Error::syntax(
                        self.line,
                        col,
                        format!("unknown variable `{name}`"),
                    )),
                }
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek_sym() != Some(')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Tok::Sym(c) => self.err(format!("unexpected `{c}`")),
        }
    }
}

impl MultiPoly {
    /// Parses `text` into a polynomial over `space`.
    pub fn parse(text: &str, space: &SpaceRef) -> Result<MultiPoly> {
        Self::parse_on_line(text, space, 1, 0)
    }

    /// Like [`MultiPoly::parse`], reporting errors at `line` and with columns
    /// shifted by `col_offset`.
    pub fn parse_on_line(
        text: &str,
        space: &SpaceRef,
        line: usize,
        col_offset: usize,
    ) -> Result<MultiPoly> {
        let shift = |e: Error| match e {
            Error::Syntax {
                line,
                column,
                message,
            } => Error::Syntax {
                line,
                column: column + col_offset,
                message,
            },
            other => other,
        };
        let toks = Lexer::tokenize(text, line).map_err(shift)?;
        let mut p = Parser {
            toks,
            pos: 0,
            space,
            line,
            end_col: text.chars().count() + 1,
        };
        let result = p.expr().map_err(shift)?;
        if p.pos != p.toks.len() {
            return p
                .err("unexpected token (multiplication must be explicit)")
                .map_err(shift);
        }
        Ok(result)
    }
}

/// Parses an exact rational literal such as `-3/4` or `5`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() || den.starts_with('-') || den.starts_with('+') {
        return None;
    }
    Some(Rational::new(n, d))
}
