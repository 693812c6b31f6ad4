//! Recursive-descent reader for the polynomial text format.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer ('/' integer)? | 'x' integer | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_traits::Zero;

use super::multipoly::MultiPoly;
use super::{PolyError, Q};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(Q),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn syntax(pos: usize, msg: impl Into<String>) -> PolyError {
    PolyError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |start: usize| -> usize {
        let mut j = start;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let ch = bytes[i];
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            b'*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            b'^' => {
                out.push((i, Token::Caret));
                i += 1;
            }
            b'(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            b'x' => {
                let end = digits(i + 1);
                if end == i + 1 {
                    return Err(syntax(i, "variable name needs an index, e.g. x0"));
                }
                let idx: usize = text[i + 1..end]
                    .parse()
                    .map_err(|_| syntax(i, "variable index too large"))?;
                out.push((i, Token::Var(idx)));
                i = end;
            }
            b'0'..=b'9' => {
                let end = digits(i);
                let num: BigInt = text[i..end].parse().expect("digits");
                if end < bytes.len() && bytes[end] == b'/' {
                    let dend = digits(end + 1);
                    if dend == end + 1 {
                        return Err(syntax(end, "expected denominator after '/'"));
                    }
                    let den: BigInt = text[end + 1..dend].parse().expect("digits");
                    if den.is_zero() {
                        return Err(syntax(end + 1, "zero denominator"));
                    }
                    out.push((i, Token::Num(Q::new(num, den))));
                    i = dend;
                } else {
                    out.push((i, Token::Num(Q::from_integer(num))));
                    i = end;
                }
            }
            _ => return Err(syntax(i, format!("unexpected character '{}'", ch as char))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    nvars: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.unary()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly, PolyError> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly, PolyError> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            let at = self.here();
            match self.peek().cloned() {
                Some(Token::Num(q)) if q.is_integer() => {
                    self.pos += 1;
                    let k: u32 = q
                        .to_integer()
                        .try_into()
                        .map_err(|_| syntax(at, "exponent out of range"))?;
                    Ok(base.pow(k))
                }
                _ => Err(syntax(at, "expected a non-negative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly, PolyError> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Token::Num(q)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(self.nvars, q))
            }
            Some(Token::Var(i)) => {
                self.pos += 1;
                if i >= self.nvars {
                    return Err(PolyError::VariableOutOfRange {
                        index: i,
                        nvars: self.nvars,
                    });
                }
                Ok(MultiPoly::var(self.nvars, i))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(syntax(self.here(), "expected ')'")),
                }
            }
            Some(t) => Err(syntax(at, format!("unexpected token {t:?}"))),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }
}

/// Parses an arbitrary (not necessarily homogeneous) polynomial.
pub fn parse_multipoly(text: &str, nvars: usize) -> Result<MultiPoly, PolyError> {
    if nvars == 0 {
        return Err(PolyError::NoVariables);
    }
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        nvars,
        end: text.len(),
    };
    let poly = p.expr()?;
    if p.pos != tokens.len() {
        return Err(syntax(p.here(), "trailing input"));
    }
    Ok(poly)
}

/// Number of variables implied by the highest `x<k>` index in `text`
/// (at least 1).
pub fn infer_nvars(text: &str) -> Result<usize, PolyError> {
    let tokens = tokenize(text)?;
    Ok(tokens
        .iter()
        .filter_map(|(_, t)| match t {
            Token::Var(i) => Some(i + 1),
            _ => None,
        })
        .max()
        .unwrap_or(1))
}
