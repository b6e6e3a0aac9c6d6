//! Truncated power series written as formulas in `t`, e.g. `t*exp(-t)`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? uint)?
//! atom   := uint | 't' | ('exp' | 'log') '(' expr ')' | '(' expr ')'
//! ```

use num_bigint::BigInt;
use umbral_core::{Error, Poly, Rational, Result, Series};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i].parse().expect("digits");
            out.push((Tok::Int(n), start));
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            i += 1;
            out.push((Tok::Op(c), start));
        } else {
            return Err(syntax(start, format!("unexpected character {c:?}")));
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    order: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
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

    fn is_op(&self, c: char) -> bool {
        *self.peek() == Tok::Op(c)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.is_op(c) {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Series> {
        let mut acc = self.term()?;
        loop {
            if self.is_op('+') {
                self.bump();
                acc = acc.add(&self.term()?)?;
            } else if self.is_op('-') {
                self.bump();
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Series> {
        let mut acc = self.unary()?;
        loop {
            if self.is_op('*') {
                self.bump();
                acc = acc.mul(&self.unary()?)?;
            } else if self.is_op('/') {
                self.bump();
                acc = acc.mul(&self.unary()?.reciprocal()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Series> {
        if self.is_op('-') {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if !self.is_op('^') {
            return Ok(base);
        }
        self.bump();
        let negative = self.is_op('-');
        if negative {
            self.bump();
        }
        let at = self.offset();
        let n = match self.bump() {
            Tok::Int(n) => i64::try_from(n).map_err(|_| syntax(at, "exponent too large"))?,
            _ => return Err(syntax(at, "expected an integer exponent")),
        };
        if negative {
            base.reciprocal()?.pow_int(n)
        } else {
            base.pow_int(n)
        }
    }

    fn atom(&mut self) -> Result<Series> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => Ok(Series::constant(Poly::constant(Rational::from_integer(n)), self.order)),
            Tok::Ident(name) => match name.as_str() {
                "t" => Ok(Series::t(self.order)),
                "exp" | "log" => {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    if name == "exp" {
                        arg.exp()
                    } else {
                        arg.log()
                    }
                }
                _ => Err(syntax(at, format!("unknown name {name:?}"))),
            },
            Tok::Op('(') => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            other => Err(syntax(at, format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses `src` as a series truncated at `t^order`.
pub fn parse_series(src: &str, order: usize) -> Result<Series> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        order,
    };
    let s = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(src: &str) -> Vec<String> {
        parse_series(src, 4)
            .unwrap()
            .coeffs()
            .iter()
            .map(|c| c.to_string())
            .collect()
    }

    #[test]
    fn elementary_series() {
        assert_eq!(coeffs("t*exp(-t)"), ["0", "1", "-1", "1/2", "-1/6"]);
        assert_eq!(coeffs("exp(t) - 1"), ["0", "1", "1/2", "1/6", "1/24"]);
        assert_eq!(coeffs("log(1 + t)"), ["0", "1", "-1/2", "1/3", "-1/4"]);
        assert_eq!(coeffs("t/(1 - t)"), ["0", "1", "1", "1", "1"]);
        assert_eq!(coeffs("t*(2 + t)^-1"), ["0", "1/2", "-1/4", "1/8", "-1/16"]);
        assert_eq!(coeffs("2*t^2"), ["0", "0", "2", "0", "0"]);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_series("t +", 4), Err(Error::Parse { offset: 3, .. })));
        assert!(matches!(parse_series("sin(t)", 4), Err(Error::Parse { offset: 0, .. })));
        assert!(parse_series("exp(1 + t)", 4).is_err());
        assert!(parse_series("1/t", 4).is_err());
    }
}
