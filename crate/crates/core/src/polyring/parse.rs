//! Recursive-descent parser for `+ - * / ^ ( )` expressions over table symbols.
//!
//! `/` is accepted only with a constant divisor, and `**` is a synonym for `^`.

use std::sync::Arc;

use num_bigint::BigInt;

use super::order::MonomialOrder;
use super::poly::{lex, Poly};
use super::rational::Q;
use super::table::table;
use super::PolyError;

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

fn lex_tokens(s: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' if b.get(i + 1) == Some(&b'*') => {
                i += 1;
                Tok::Caret
            }
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i + 1 < b.len() && (b[i + 1] as char).is_ascii_digit() {
                    i += 1;
                }
                Tok::Num(s[start..=i].parse().unwrap())
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i + 1 < b.len() && ((b[i + 1] as char).is_ascii_alphanumeric() || b[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(s[start..=i].to_string())
            }
            other => return Err(PolyError::Syntax { pos: i, msg: format!("unexpected character `{other}`") }),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
    order: &'a Arc<MonomialOrder>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: &str) -> Result<T, PolyError> {
        Err(PolyError::Syntax { pos: self.at(), msg: msg.to_string() })
    }

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -&self.term()?
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.factor()?;
                    let c = d.constant_value().ok_or(PolyError::NonConstantDivisor)?;
                    if c.is_zero() {
                        return Err(PolyError::ZeroDenominator);
                    }
                    acc = acc.scale(&c.inv());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly, PolyError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(-&self.factor()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| PolyError::Syntax { pos: self.at(), msg: "exponent too large".into() })?;
                    return Ok(base.pow(e));
                }
                _ => return self.err("expected a nonnegative integer exponent"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, PolyError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Poly::constant_in(self.order, Q::from(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = table().lookup(&name).ok_or(PolyError::UnknownSymbol(name))?;
                Ok(Poly::var(i).with_order(self.order))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(_) => self.err("expected a number, symbol or `(`"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses under the default lex order.
pub fn parse(text: &str) -> Result<Poly, PolyError> {
    parse_in(text, &lex())
}

pub fn parse_in(text: &str, order: &Arc<MonomialOrder>) -> Result<Poly, PolyError> {
    let toks = lex_tokens(text)?;
    let mut p = Parser { toks, pos: 0, len: text.len(), order };
    if p.toks.is_empty() {
        return p.err("empty expression");
    }
    let r = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let f2 = parse("-X31*X13 - X41*X23 + X11*X33 + X21*X43 - 1").unwrap();
        assert_eq!(f2.len(), 5);
        assert!(parse("0").unwrap().is_zero());
        assert_eq!(parse("(X11+1)*(X11-1)").unwrap().to_string(), "X11^2 - 1");
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("X99 + 1"), Err(PolyError::UnknownSymbol(_))));
        assert!(matches!(parse("X11 +"), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse("1/0"), Err(PolyError::ZeroDenominator)));
        assert!(matches!(parse("1/X11"), Err(PolyError::NonConstantDivisor)));
        assert!(matches!(parse("(X11"), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse(""), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse("X11 $"), Err(PolyError::Syntax { .. })));
    }

    #[test]
    fn rationals_powers_and_unary() {
        assert_eq!(parse("3/6*X11").unwrap().to_string(), "1/2*X11");
        assert_eq!(parse("X11**2").unwrap(), parse("X11^2").unwrap());
        assert_eq!(parse("-X11^2").unwrap().to_string(), "-X11^2");
        assert_eq!(parse("2*-X11").unwrap().to_string(), "-2*X11");
    }

    #[test]
    fn print_parse_roundtrip() {
        for s in ["X11^2*c11 - 1/3*X44 + 7", "-X12*X21 + d1", "0", "-5/7"] {
            let p = parse(s).unwrap();
            assert_eq!(parse(&p.to_string()).unwrap(), p);
        }
    }
}
