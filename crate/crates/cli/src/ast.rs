//! Surface syntax for umbral expressions and its canonical rendering.

use std::fmt;

use umbral_core::poly::format_rational;
use umbral_core::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Inv,
    Bell,
    Part,
    Comp,
    Bar,
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Inv => "inv",
            Func::Bell => "bell",
            Func::Part => "part",
            Func::Comp => "comp",
            Func::Bar => "bar",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "inv" => Func::Inv,
            "bell" => Func::Bell,
            "part" => Func::Part,
            "comp" => Func::Comp,
            "bar" => Func::Bar,
            _ => return None,
        })
    }
}

/// Left operand of a point product.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DotLhs {
    Int(u64),
    Ident { name: String, primes: usize },
    Group(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Atom { name: String, primes: usize },
    Number(Rational),
    Sum(Box<Expr>, Box<Expr>),
    Diff(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    Power(Box<Expr>, u32),
    PointPower(Box<Expr>, u32),
    Dot(DotLhs, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn atom(name: &str) -> Expr {
        Expr::Atom {
            name: name.to_string(),
            primes: 0,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Sum(..) | Expr::Diff(..) => 1,
            Expr::Product(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Power(..) | Expr::PointPower(..) => 4,
            Expr::Dot(..) => 5,
            Expr::Atom { .. } | Expr::Number(_) | Expr::Call(..) => 6,
        }
    }
}

fn primes(n: usize) -> String {
    "'".repeat(n)
}

struct Wrapped<'a>(&'a Expr, u8);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.precedence() < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for DotLhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DotLhs::Int(n) => write!(f, "{n}"),
            DotLhs::Ident { name, primes: p } => write!(f, "{name}{}", primes(*p)),
            DotLhs::Group(e) => write!(f, "({e})"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Atom { name, primes: p } => write!(f, "{name}{}", primes(*p)),
            Expr::Number(r) => write!(f, "{}", format_rational(r)),
            Expr::Sum(a, b) => write!(f, "{} + {}", Wrapped(a, 1), Wrapped(b, 2)),
            Expr::Diff(a, b) => write!(f, "{} - {}", Wrapped(a, 1), Wrapped(b, 2)),
            Expr::Neg(a) => write!(f, "-{}", Wrapped(a, 3)),
            Expr::Product(a, b) => write!(f, "{}*{}", Wrapped(a, 2), Wrapped(b, 3)),
            Expr::Power(a, n) => write!(f, "{}^{n}", Wrapped(a, 6)),
            Expr::PointPower(a, n) => write!(f, "{}^.{n}", Wrapped(a, 6)),
            Expr::Dot(lhs, rhs) => write!(f, "{lhs}.{}", Wrapped(rhs, 5)),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A parsed command-line expression: `E[expr]` or a bare umbral polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub expectation: bool,
    pub expr: Expr,
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expectation {
            write!(f, "E[{}]", self.expr)
        } else {
            write!(f, "{}", self.expr)
        }
    }
}
