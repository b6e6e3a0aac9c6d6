//! Truncated exponential generating functions over [`Poly`] coefficients.
//!
//! A [`Series`] of order `N` stores ordinary coefficients `c_0..=c_N` of
//! `sum c_k t^k`; the k-th moment it encodes is `k! * c_k`. All binary
//! operations require equal orders and never re-truncate silently.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{int, Poly, Rational};

/// Truncation order used when nothing else is configured.
pub const DEFAULT_ORDER: usize = 12;

pub fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    Rational::from_integer(acc)
}

pub fn binomial(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    Rational::from_integer(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct Series {
    coeffs: Vec<Poly>,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    order: usize,
    coeffs: Vec<Poly>,
}

impl TryFrom<SeriesRepr> for Series {
    type Error = Error;
    fn try_from(r: SeriesRepr) -> Result<Series> {
        Series::new(r.coeffs, r.order)
    }
}

impl From<Series> for SeriesRepr {
    fn from(s: Series) -> SeriesRepr {
        SeriesRepr {
            order: s.order(),
            coeffs: s.coeffs,
        }
    }
}

impl Series {
    /// Builds a series of the given order, padding missing coefficients with zeros.
    pub fn new(mut coeffs: Vec<Poly>, order: usize) -> Result<Series> {
        if coeffs.len() > order + 1 {
            return Err(Error::TooManyCoefficients {
                requested: coeffs.len(),
                order,
            });
        }
        coeffs.resize(order + 1, Poly::zero());
        Ok(Series { coeffs })
    }

    pub fn zero(order: usize) -> Series {
        Series {
            coeffs: vec![Poly::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Series {
        Series::constant(Poly::one(), order)
    }

    pub fn constant(c: Poly, order: usize) -> Series {
        let mut s = Series::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The delta series `t`.
    pub fn t(order: usize) -> Series {
        let mut s = Series::zero(order);
        if order >= 1 {
            s.coeffs[1] = Poly::one();
        }
        s
    }

    /// `e^t` truncated.
    pub fn exp_t(order: usize) -> Series {
        Series {
            coeffs: (0..=order)
                .map(|k| Poly::constant(factorial(k).recip()))
                .collect(),
        }
    }

    /// The generating function `sum m_k t^k / k!` of a moment sequence.
    pub fn from_moments(moments: &[Poly]) -> Series {
        assert!(!moments.is_empty(), "a moment sequence has at least m_0");
        Series {
            coeffs: moments
                .iter()
                .enumerate()
                .map(|(k, m)| m.scale(&factorial(k).recip()))
                .collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Poly {
        &self.coeffs[k]
    }

    pub fn is_unital(&self) -> bool {
        self.coeffs[0].is_one()
    }

    pub fn is_delta(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    /// `k! * c_k`.
    pub fn egf_moment(&self, k: usize) -> Result<Poly> {
        if k > self.order() {
            return Err(Error::OrderExceeded {
                requested: k,
                available: self.order(),
            });
        }
        Ok(self.coeffs[k].scale(&factorial(k)))
    }

    pub fn moments(&self) -> Vec<Poly> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.scale(&factorial(k)))
            .collect()
    }

    /// Explicit truncation to a lower order.
    pub fn truncate(&self, order: usize) -> Result<Series> {
        if order > self.order() {
            return Err(Error::OrderExceeded {
                requested: order,
                available: self.order(),
            });
        }
        Ok(Series {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    fn check_order(&self, other: &Series) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_order(other)?;
        Ok(Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.check_order(other)?;
        Ok(Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_order(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Series) -> Series {
        let n = self.order();
        let mut out = vec![Poly::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Series { coeffs: out }
    }

    pub fn scalar_mul(&self, c: &Poly) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn neg(&self) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    /// `f(c t)`: scales the k-th coefficient by `c^k`.
    pub fn dilate(&self, c: &Poly) -> Series {
        let mut power = Poly::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a * &power);
            power = &power * c;
        }
        Series { coeffs }
    }

    /// Reciprocal of a unital series.
    fn reciprocal_unital(&self) -> Series {
        let n = self.order();
        let mut r = vec![Poly::zero(); n + 1];
        r[0] = Poly::one();
        for k in 1..=n {
            let mut acc = Poly::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() && !r[k - j].is_zero() {
                    acc += &(&self.coeffs[j] * &r[k - j]);
                }
            }
            r[k] = -acc;
        }
        Series { coeffs: r }
    }

    /// Reciprocal of a series whose constant term is a nonzero rational.
    pub fn reciprocal(&self) -> Result<Series> {
        let inv = self.coeffs[0]
            .inverse()
            .ok_or_else(|| Error::NotInvertible("constant term has no reciprocal".into()))?;
        Ok(self.scalar_mul(&inv).reciprocal_unital().scalar_mul(&inv))
    }

    pub fn pow_int(&self, n: i64) -> Result<Series> {
        let base = if n < 0 {
            if !self.is_unital() {
                return Err(Error::NegativePowerOfDeltaSeries);
            }
            self.reciprocal_unital()
        } else {
            self.clone()
        };
        let mut exp = n.unsigned_abs();
        let mut acc = Series::one(self.order());
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_unchecked(&sq);
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.mul_unchecked(&sq);
            }
        }
        Ok(acc)
    }

    /// `exp(h)` for a delta series `h`.
    pub fn exp(&self) -> Result<Series> {
        if !self.is_delta() {
            return Err(Error::Domain("exp requires a delta series (c_0 = 0)".into()));
        }
        let n = self.order();
        let mut e = vec![Poly::zero(); n + 1];
        e[0] = Poly::one();
        // E' = h' E
        for m in 1..=n {
            let mut acc = Poly::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() && !e[m - k].is_zero() {
                    acc += &(&self.coeffs[k] * &e[m - k]).scale(&int(k as i64));
                }
            }
            e[m] = acc.scale(&int(m as i64).recip());
        }
        Ok(Series { coeffs: e })
    }

    /// `log(f)` for a unital series `f`.
    pub fn log(&self) -> Result<Series> {
        if !self.is_unital() {
            return Err(Error::Domain("log requires a unital series (c_0 = 1)".into()));
        }
        let n = self.order();
        let mut l = vec![Poly::zero(); n + 1];
        // f L' = f'
        for m in 1..=n {
            let mut acc = Poly::zero();
            for k in 1..m {
                if !l[k].is_zero() && !self.coeffs[m - k].is_zero() {
                    acc += &(&l[k] * &self.coeffs[m - k]).scale(&int(k as i64));
                }
            }
            l[m] = &self.coeffs[m] - &acc.scale(&int(m as i64).recip());
        }
        Ok(Series { coeffs: l })
    }

    /// `f^p = exp(p log f)` for a unital `f` and polynomial exponent `p`.
    pub fn pow_poly(&self, p: &Poly) -> Result<Series> {
        self.log()?.scalar_mul(p).exp()
    }

    /// `g(h(t))` for a delta series `h`.
    pub fn compose(&self, h: &Series) -> Result<Series> {
        self.check_order(h)?;
        if !h.is_delta() {
            return Err(Error::Domain("compose requires a delta inner series".into()));
        }
        let n = self.order();
        let mut acc = Series::constant(self.coeffs[n].clone(), n);
        for k in (0..n).rev() {
            acc = acc.mul_unchecked(h);
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse of a delta series with invertible linear coefficient.
    ///
    /// Solves `r(h(t)) = t` one coefficient at a time: `r_k` enters the k-th
    /// coefficient only through `r_k c_1^k`.
    pub fn revert(&self) -> Result<Series> {
        if !self.is_delta() {
            return Err(Error::Domain("revert requires a delta series".into()));
        }
        let n = self.order();
        if n == 0 {
            return Ok(Series::zero(0));
        }
        let c1_inv = self.coeffs[1]
            .inverse()
            .ok_or_else(|| Error::NotInvertible(format!("linear coefficient {}", self.coeffs[1])))?;
        let mut powers = Vec::with_capacity(n + 1);
        powers.push(Series::one(n));
        for j in 1..=n {
            let next = powers[j - 1].mul_unchecked(self);
            powers.push(next);
        }
        let mut r = vec![Poly::zero(); n + 1];
        for k in 1..=n {
            let mut acc = if k == 1 { Poly::one() } else { Poly::zero() };
            for j in 1..k {
                if !r[j].is_zero() {
                    acc -= &(&r[j] * &powers[j].coeffs[k]);
                }
            }
            r[k] = &acc * &c1_inv.pow(k as u32);
        }
        Ok(Series { coeffs: r })
    }

    /// Formal derivative; the result has order one less.
    pub fn derivative(&self) -> Series {
        let n = self.order();
        if n == 0 {
            return Series::zero(0);
        }
        Series {
            coeffs: (1..=n)
                .map(|k| self.coeffs[k].scale(&int(k as i64)))
                .collect(),
        }
    }

    /// `(s(t) - s(0)) / t`; the result has order one less.
    pub fn shift_down(&self) -> Series {
        let n = self.order();
        if n == 0 {
            return Series::zero(0);
        }
        Series {
            coeffs: self.coeffs[1..].to_vec(),
        }
    }

    /// Multiplies by `t`, dropping the top coefficient.
    pub fn shift_up(&self) -> Series {
        let n = self.order();
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(Poly::zero());
        coeffs.extend_from_slice(&self.coeffs[..n]);
        Series { coeffs }
    }

    /// Applies a map to every coefficient (used for substitutions in indeterminates).
    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.order() + 1)
    }
}
