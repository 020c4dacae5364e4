//! Recursive-descent reader for operator expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer ('/' integer)? | 'x' index | 'Dx' index | '(' expr ')'
//! ```
//!
//! `*` is the noncommutative product taken in source order.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{weyl_mul, WeylPoly};
use crate::error::{Error, Result};
use crate::Q;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Tok::Int(s.parse().unwrap()), pos));
                continue;
            }
            a if a.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
                continue;
            }
            other => {
                return Err(Error::Syntax { pos, msg: format!("unexpected character {other:?}") })
            }
        };
        out.push((tok, pos));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    n: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.1)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.0.clone());
        self.at += 1;
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<WeylPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<WeylPoly> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            let rhs = self.unary()?;
            acc = weyl_mul(&acc, &rhs)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<WeylPoly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<WeylPoly> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some(Tok::Int(k)) => {
                    let k: u32 = k
                        .try_into()
                        .map_err(|_| Error::Syntax { pos, msg: "exponent too large".into() })?;
                    return Ok(base.pow(k));
                }
                _ => {
                    return Err(Error::Syntax { pos, msg: "expected a non-negative integer exponent".into() })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<WeylPoly> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(num)) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let dpos = self.pos();
                    match self.bump() {
                        Some(Tok::Int(den)) if !den.is_zero() => {
                            Ok(WeylPoly::constant(self.n, Q::new(num, den)))
                        }
                        Some(Tok::Int(_)) => Err(Error::Syntax { pos: dpos, msg: "zero denominator".into() }),
                        _ => Err(Error::Syntax { pos: dpos, msg: "expected a denominator".into() }),
                    }
                } else {
                    Ok(WeylPoly::constant(self.n, Q::from_integer(num)))
                }
            }
            Some(Tok::Ident(name)) => self.variable(&name, pos),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Syntax { pos: self.toks.get(self.at - 1).map_or(self.end, |t| t.1), msg: "expected `)`".into() }),
                }
            }
            Some(t) => Err(Error::Syntax { pos, msg: format!("unexpected {t:?}") }),
            None => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
        }
    }

    fn variable(&self, name: &str, pos: usize) -> Result<WeylPoly> {
        let (is_d, digits) = if let Some(rest) = name.strip_prefix("Dx") {
            (true, rest)
        } else if let Some(rest) = name.strip_prefix('x') {
            (false, rest)
        } else {
            return Err(Error::UnknownVariable { name: name.into(), pos });
        };
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) || digits.starts_with('0') {
            return Err(Error::UnknownVariable { name: name.into(), pos });
        }
        let k: usize = digits
            .parse()
            .map_err(|_| Error::UnknownVariable { name: name.into(), pos })?;
        if k > self.n {
            return Err(Error::VariableOutOfRange { name: name.into(), pos, n: self.n });
        }
        Ok(if is_d { WeylPoly::d(self.n, k) } else { WeylPoly::x(self.n, k) })
    }
}

/// Reads an operator of `A_n` written in the `x<k>` / `Dx<k>` grammar.
pub fn parse_operator(text: &str, n: usize) -> Result<WeylPoly> {
    let toks = lex(text)?;
    let end = text.chars().count() + 1;
    if toks.is_empty() {
        return Err(Error::Syntax { pos: 1, msg: "empty expression".into() });
    }
    let mut p = Parser { toks, at: 0, n, end };
    let out = p.expr()?;
    if p.at < p.toks.len() {
        return p.syntax("trailing input");
    }
    Ok(out)
}
