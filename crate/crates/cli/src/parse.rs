//! Recursive-descent parser for umbral expressions.
//!
//! ```text
//! query  := 'E' '[' expr ']' | 'E' '(' expr ')' | expr
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | base ('^' uint | '^.' uint)?
//! base   := uint '.' base | ident clone* '.' base | '(' expr ')' '.' base
//!         | func '(' args ')' | ident clone* | number | '(' expr ')'
//! number := uint | uint '/' uint
//! clone  := '\''
//! ```

use num_bigint::BigInt;
use umbral_core::{Error, Rational, Result};

use crate::ast::{DotLhs, Expr, Func, Query};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(u64),
    Ratio(u64, u64),
    Ident(String),
    Prime,
    Plus,
    Minus,
    Star,
    Caret,
    CaretDot,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
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
    let number = |i: &mut usize| -> Result<u64> {
        let start = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        src[start..*i]
            .parse()
            .map_err(|_| syntax(start, "integer literal too large"))
    };
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '0'..='9' => {
                let n = number(&mut i)?;
                if i + 1 < bytes.len() && bytes[i] == b'/' && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                    let d = number(&mut i)?;
                    if d == 0 {
                        return Err(syntax(start, "zero denominator"));
                    }
                    out.push((Tok::Ratio(n, d), start));
                } else {
                    out.push((Tok::Int(n), start));
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            '\'' => Tok::Prime,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' if bytes.get(i + 1) == Some(&b'.') => {
                i += 1;
                Tok::CaretDot
            }
            '^' => Tok::Caret,
            '.' => Tok::Dot,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            other => return Err(syntax(start, format!("unexpected character {other:?}"))),
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
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

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Sum(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Diff(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Product(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn exponent(&mut self) -> Result<u32> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => u32::try_from(n).map_err(|_| syntax(at, "exponent too large")),
            _ => Err(syntax(at, "expected a nonnegative integer exponent")),
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        match self.peek() {
            Tok::Caret => {
                self.bump();
                Ok(Expr::Power(Box::new(base), self.exponent()?))
            }
            Tok::CaretDot => {
                self.bump();
                Ok(Expr::PointPower(Box::new(base), self.exponent()?))
            }
            _ => Ok(base),
        }
    }

    fn primes(&mut self) -> usize {
        let mut n = 0;
        while *self.peek() == Tok::Prime {
            self.bump();
            n += 1;
        }
        n
    }

    fn dot_rhs(&mut self, lhs: DotLhs) -> Result<Expr> {
        self.expect(Tok::Dot, "'.'")?;
        Ok(Expr::Dot(lhs, Box::new(self.base()?)))
    }

    fn base(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => {
                if *self.peek() == Tok::Dot {
                    self.dot_rhs(DotLhs::Int(n))
                } else {
                    Ok(Expr::Number(Rational::from_integer(BigInt::from(n))))
                }
            }
            Tok::Ratio(n, d) => Ok(Expr::Number(Rational::new(BigInt::from(n), BigInt::from(d)))),
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    if let Some(func) = Func::from_name(&name) {
                        return self.call(func, at);
                    }
                    return Err(syntax(at, format!("unknown function {name:?}")));
                }
                let primes = self.primes();
                if *self.peek() == Tok::Dot {
                    self.dot_rhs(DotLhs::Ident { name, primes })
                } else {
                    Ok(Expr::Atom { name, primes })
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                if *self.peek() == Tok::Dot {
                    self.dot_rhs(DotLhs::Group(Box::new(inner)))
                } else {
                    Ok(inner)
                }
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            other => Err(syntax(at, format!("unexpected token {other:?}"))),
        }
    }

    fn call(&mut self, func: Func, at: usize) -> Result<Expr> {
        self.expect(Tok::LParen, "'('")?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            args.push(self.expr()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.expr()?);
            }
        }
        self.expect(Tok::RParen, "')'")?;
        let (lo, hi) = match func {
            Func::Inv | Func::Bell | Func::Bar => (1, 1),
            Func::Part => (1, 2),
            Func::Comp => (2, 2),
        };
        if args.len() < lo || args.len() > hi {
            return Err(syntax(
                at,
                format!("{}() takes {lo}..={hi} arguments, got {}", func.name(), args.len()),
            ));
        }
        Ok(Expr::Call(func, args))
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Parses `E[expr]`, `E(expr)` or a bare expression.
pub fn parse_query(src: &str) -> Result<Query> {
    let toks = lex(src)?;
    let wrapped = matches!(&toks[0].0, Tok::Ident(e) if e == "E")
        && matches!(toks.get(1).map(|t| &t.0), Some(Tok::LBracket) | Some(Tok::LParen));
    if !wrapped {
        return Ok(Query {
            expectation: false,
            expr: parse_expr(src)?,
        });
    }
    let close = if toks[1].0 == Tok::LBracket { Tok::RBracket } else { Tok::RParen };
    let mut p = Parser { toks, pos: 2 };
    let expr = p.expr()?;
    let what = if close == Tok::RBracket { "']'" } else { "')'" };
    p.expect(close, what)?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.offset(), "unexpected input after E[...]"));
    }
    Ok(Query {
        expectation: true,
        expr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt(s: &str) -> String {
        parse_query(s).unwrap().to_string()
    }

    #[test]
    fn precedence_and_rendering() {
        assert_eq!(rt("E[(a + 2.b)^3]"), "E[(a + 2.b)^3]");
        assert_eq!(rt("a+b*c^2"), "a + b*c^2");
        assert_eq!(rt("x.y.a"), "x.y.a");
        assert_eq!(rt("2.a^3"), "(2.a)^3");
        assert_eq!(rt("2.(a^3)"), "2.(a^3)");
        assert_eq!(rt("(x + y).a'"), "(x + y).a'");
        assert_eq!(rt("-3.bar(a)"), "-3.bar(a)");
        assert_eq!(rt("a - (b - c)"), "a - (b - c)");
        assert_eq!(rt("(a*b)*c"), "a*b*c");
        assert_eq!(rt("a*(b*c)"), "a*(b*c)");
        assert_eq!(rt("E(comp(g, a)^.2)"), "E[comp(g, a)^.2]");
        assert_eq!(rt("3/2*a"), "3/2*a");
        match parse_expr("2.a^3").unwrap() {
            Expr::Power(inner, 3) => assert!(matches!(*inner, Expr::Dot(DotLhs::Int(2), _))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let offset = |s: &str| match parse_query(s) {
            Err(Error::Parse { offset, .. }) => offset,
            other => panic!("{other:?}"),
        };
        assert_eq!(offset("a + "), 4);
        assert_eq!(offset("a ^ b"), 4);
        assert_eq!(offset("E[a"), 3);
        assert_eq!(offset("comp(a)"), 0);
        assert_eq!(offset("a $ b"), 2);
        assert_eq!(offset("foo(a)"), 0);
    }
}
