//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' uint)?
//! atom   := number | ident | '(' expr ')'
//! ```
//!
//! Division is accepted only by nonzero constants, which is how rational
//! literals such as `3/4` are written.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{PolyError, Polynomial, Rational, Ring};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((start, Tok::Num(n)));
                continue;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(PolyError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    ring: &'a Ring,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
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

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    let at = self.offset();
                    self.bump();
                    let d = self.unary()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(PolyError::BadDivision(at));
                    }
                    acc = acc.scale(&d.constant_term().recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) => {
                let e: u32 = n.try_into().map_err(|_| PolyError::Syntax {
                    pos: at,
                    msg: "exponent too large".into(),
                })?;
                Ok(base.pow(e))
            }
            Some(Tok::Minus) => Err(PolyError::NegativeExponent(at)),
            _ => Err(PolyError::Syntax {
                pos: at,
                msg: "expected a non-negative integer exponent".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(Polynomial::constant(self.ring, Rational::from_integer(n))),
            Some(Tok::Ident(name)) => Polynomial::var_named(self.ring, &name),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let close = self.offset();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(PolyError::Syntax {
                        pos: close,
                        msg: "expected `)`".into(),
                    }),
                }
            }
            Some(t) => Err(PolyError::Syntax {
                pos: at,
                msg: format!("unexpected token {t:?}"),
            }),
            None => Err(PolyError::Syntax {
                pos: at,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses `text` into a canonical polynomial over `ring`.
pub fn parse_poly(text: &str, ring: &Ring) -> Result<Polynomial, PolyError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(PolyError::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        ring,
    };
    let out = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(PolyError::Syntax {
            pos: p.offset(),
            msg: "trailing input".into(),
        });
    }
    debug_assert!(out.terms().all(|(_, c)| !c.is_zero()));
    Ok(out)
}
