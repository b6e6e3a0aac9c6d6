//! Resolution of surface expressions against a workspace.
//!
//! Point products, calls and point powers become atoms built by the
//! auxiliary constructors. The same subterm resolves to the same atom within
//! one resolver, so `(2.a)*(2.a)` is the square of a single umbra; primes
//! make uncorrelated clones, again shared per name and prime count.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use umbral_core::ops::{
    alpha_bar, bell_umbra, bernoulli_umbra, composition_umbra, dot, inverse_umbra, materialize,
    partition_umbra, point_power, DotLeft,
};
use umbral_core::umbra::{EPSILON_NAME, UNITY_NAME};
use umbral_core::{AtomId, Error, Poly, Result, UmbralExpr, Workspace};

use crate::ast::{DotLhs, Expr, Func};

pub const BELL_NAME: &str = "bell";
pub const BERNOULLI_NAME: &str = "bern";

pub struct Resolver<'w> {
    ws: &'w mut Workspace,
    built: HashMap<String, AtomId>,
    clones: HashMap<(String, usize), AtomId>,
}

impl<'w> Resolver<'w> {
    pub fn new(ws: &'w mut Workspace) -> Resolver<'w> {
        Resolver {
            ws,
            built: HashMap::new(),
            clones: HashMap::new(),
        }
    }

    pub fn workspace(&self) -> &Workspace {
        self.ws
    }

    fn memo(&mut self, key: String, build: impl FnOnce(&mut Workspace) -> Result<AtomId>) -> Result<AtomId> {
        if let Some(id) = self.built.get(&key) {
            return Ok(*id);
        }
        let id = build(self.ws)?;
        self.built.insert(key, id);
        Ok(id)
    }

    fn named(&mut self, name: &str) -> Result<AtomId> {
        match name {
            EPSILON_NAME => Ok(self.ws.epsilon()),
            UNITY_NAME => Ok(self.ws.unity()),
            BELL_NAME => self.memo(BELL_NAME.into(), |ws| bell_umbra(ws, None)),
            BERNOULLI_NAME => self.memo(BERNOULLI_NAME.into(), bernoulli_umbra),
            _ => self.ws.lookup(name),
        }
    }

    fn atom(&mut self, name: &str, primes: usize) -> Result<AtomId> {
        let base = self.named(name)?;
        if primes == 0 {
            return Ok(base);
        }
        let key = (name.to_string(), primes);
        if let Some(id) = self.clones.get(&key) {
            return Ok(*id);
        }
        let id = self.ws.clone_atom(base);
        self.clones.insert(key, id);
        Ok(id)
    }

    /// Resolves to an evaluable umbral polynomial.
    pub fn resolve(&mut self, e: &Expr) -> Result<UmbralExpr> {
        Ok(match e {
            Expr::Atom { name, primes } => {
                if *primes == 0 && self.ws.is_indeterminate(name) {
                    UmbralExpr::Const(Poly::var(name))
                } else {
                    if self.ws.is_indeterminate(name) {
                        return Err(Error::Domain(format!("indeterminate {name} cannot be cloned")));
                    }
                    UmbralExpr::Atom(self.atom(name, *primes)?)
                }
            }
            Expr::Number(r) => UmbralExpr::Const(Poly::constant(r.clone())),
            Expr::Sum(a, b) => UmbralExpr::Sum(vec![self.resolve(a)?, self.resolve(b)?]),
            Expr::Diff(a, b) => {
                let lhs = self.resolve(a)?;
                UmbralExpr::Sum(vec![lhs, self.negate(b)?])
            }
            Expr::Neg(a) => self.negate(a)?,
            Expr::Product(a, b) => UmbralExpr::Product(vec![self.resolve(a)?, self.resolve(b)?]),
            Expr::Power(a, n) => self.resolve(a)?.pow(*n),
            Expr::PointPower(a, n) => {
                let inner = self.umbra(a)?;
                let n = *n as i64;
                UmbralExpr::Atom(self.memo(e.to_string(), |ws| point_power(ws, inner, n))?)
            }
            Expr::Dot(lhs, rhs) => {
                let alpha = self.umbra(rhs)?;
                let left = self.dot_left(lhs)?;
                UmbralExpr::Atom(self.memo(e.to_string(), |ws| dot(ws, &left, alpha))?)
            }
            Expr::Call(func, args) => UmbralExpr::Atom(self.call(e, func, args)?),
        })
    }

    /// `-e`: a scalar is negated, anything else becomes its inverse umbra.
    fn negate(&mut self, e: &Expr) -> Result<UmbralExpr> {
        let inner = self.resolve(e)?;
        if let Some(p) = scalar(&inner) {
            return Ok(UmbralExpr::Const(-p));
        }
        let alpha = self.materialized(e, &inner)?;
        Ok(UmbralExpr::Atom(self.memo(format!("inv:{e}"), |ws| inverse_umbra(ws, alpha))?))
    }

    fn materialized(&mut self, e: &Expr, resolved: &UmbralExpr) -> Result<AtomId> {
        if let UmbralExpr::Atom(id) = resolved {
            return Ok(*id);
        }
        let name = e.to_string();
        self.memo(name.clone(), |ws| materialize(ws, resolved, &name))
    }

    /// Resolves `e` to a single atom, materializing compound umbral polynomials.
    pub fn umbra(&mut self, e: &Expr) -> Result<AtomId> {
        let resolved = self.resolve(e)?;
        self.materialized(e, &resolved)
    }

    fn scalar_or_umbra(&mut self, e: &Expr) -> Result<DotLeft> {
        let resolved = self.resolve(e)?;
        if let Some(p) = scalar(&resolved) {
            if let Some(n) = p.as_constant().filter(|c| c.is_integer()).and_then(|c| c.to_integer().to_i64()) {
                return Ok(DotLeft::Int(n));
            }
            if let Some(x) = single_variable(&p) {
                return Ok(DotLeft::Indet(x));
            }
            return Ok(DotLeft::Scalar(p));
        }
        Ok(DotLeft::Umbra(self.materialized(e, &resolved)?))
    }

    fn dot_left(&mut self, lhs: &DotLhs) -> Result<DotLeft> {
        match lhs {
            DotLhs::Int(n) => i64::try_from(*n)
                .map(DotLeft::Int)
                .map_err(|_| Error::Domain(format!("{n} is too large for a point product"))),
            DotLhs::Ident { name, primes } => {
                if self.ws.is_indeterminate(name) {
                    if *primes > 0 {
                        return Err(Error::Domain(format!("indeterminate {name} cannot be cloned")));
                    }
                    return Ok(DotLeft::Indet(name.clone()));
                }
                Ok(DotLeft::Umbra(self.atom(name, *primes)?))
            }
            DotLhs::Group(e) => self.scalar_or_umbra(e),
        }
    }

    fn call(&mut self, whole: &Expr, func: &Func, args: &[Expr]) -> Result<AtomId> {
        let key = whole.to_string();
        match func {
            Func::Inv => {
                let a = self.umbra(&args[0])?;
                self.memo(key, |ws| inverse_umbra(ws, a))
            }
            Func::Bar => {
                let a = self.umbra(&args[0])?;
                self.memo(key, |ws| alpha_bar(ws, a))
            }
            Func::Bell => {
                let scale = self.scalar_or_umbra(&args[0])?;
                if let DotLeft::Int(n) = scale {
                    if n < 0 {
                        return Err(Error::InvalidScale(format!("bell({n}) needs a nonnegative scale")));
                    }
                }
                self.memo(key, |ws| bell_umbra(ws, Some(&scale)))
            }
            Func::Part => {
                let a = self.umbra(&args[0])?;
                let scale = match args.get(1) {
                    Some(s) => Some(self.scalar_or_umbra(s)?),
                    None => None,
                };
                self.memo(key, |ws| partition_umbra(ws, a, scale.as_ref()))
            }
            Func::Comp => {
                let g = self.umbra(&args[0])?;
                let a = self.umbra(&args[1])?;
                self.memo(key, |ws| composition_umbra(ws, g, a))
            }
        }
    }
}

/// The value of an umbral polynomial without umbral support.
fn scalar(e: &UmbralExpr) -> Option<Poly> {
    match e {
        UmbralExpr::Atom(_) => None,
        UmbralExpr::Const(p) => Some(p.clone()),
        UmbralExpr::Sum(xs) => xs.iter().try_fold(Poly::zero(), |acc, x| Some(acc + scalar(x)?)),
        UmbralExpr::Product(xs) => xs.iter().try_fold(Poly::one(), |acc, x| Some(acc * scalar(x)?)),
        UmbralExpr::Scaled(c, x) => Some(c * &scalar(x)?),
        UmbralExpr::Power(x, n) => Some(scalar(x)?.pow(*n)),
    }
}

fn single_variable(p: &Poly) -> Option<String> {
    let vars = p.variables();
    if vars.len() == 1 && *p == Poly::var(&vars[0]) {
        return Some(vars[0].clone());
    }
    None
}

