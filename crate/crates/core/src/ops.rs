//! Constructors for auxiliary umbrae.
//!
//! Every constructor registers a fresh, uncorrelated atom. Moments come from
//! the closed forms (Bell polynomials weighted by lower factorials, Stirling
//! sums, ...) while the generating function is built independently with
//! series arithmetic; registration fails if the two disagree.

use std::fmt;

use num_traits::Zero;

use crate::combinatorics::{
    bell_number, bernoulli_series, exponential_poly_at, stirling, PartialBellTable, StirlingKind,
};
use crate::error::{Error, Result};
use crate::poly::{int, Poly, Rational};
use crate::series::{binomial, Series};
use crate::umbra::{AtomId, AtomKind, UmbralExpr, Workspace};

/// Left factor of a point product `left.alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DotLeft {
    /// `n.alpha`; negative `n` gives the inverse of `|n|.alpha`.
    Int(i64),
    /// `x.alpha` for a declared indeterminate.
    Indet(String),
    /// `p.alpha` for a polynomial `p` in declared indeterminates, e.g. `(x + y).alpha`.
    Scalar(Poly),
    /// `gamma.alpha`.
    Umbra(AtomId),
}

impl fmt::Display for DotLeft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DotLeft::Int(n) => write!(f, "{n}"),
            DotLeft::Indet(x) => write!(f, "{x}"),
            DotLeft::Scalar(p) => write!(f, "({p})"),
            DotLeft::Umbra(id) => write!(f, "{id}"),
        }
    }
}

fn common_order(ws: &Workspace, ids: &[AtomId]) -> usize {
    ids.iter().map(|id| ws.atom(*id).order()).min().unwrap_or(0)
}

fn moments_upto(ws: &Workspace, id: AtomId, order: usize) -> Vec<Poly> {
    ws.atom(id).moments[..=order].to_vec()
}

fn egf_upto(ws: &Workspace, id: AtomId, order: usize) -> Series {
    ws.atom(id).egf.truncate(order).expect("order within atom")
}

/// `f - 1` for the generating function of `id`.
fn delta_part(ws: &Workspace, id: AtomId, order: usize) -> Series {
    egf_upto(ws, id, order)
        .sub(&Series::one(order))
        .expect("equal orders")
}

fn display_name(ws: &Workspace, left: &DotLeft) -> String {
    match left {
        DotLeft::Umbra(id) => ws.atom(*id).name.clone(),
        other => other.to_string(),
    }
}

/// Resolves a scalar left factor to its polynomial value, checking indeterminates.
fn scalar_value(ws: &Workspace, left: &DotLeft) -> Result<Option<Poly>> {
    match left {
        DotLeft::Int(n) => Ok(Some(Poly::from_int(*n))),
        DotLeft::Indet(x) => {
            if !ws.is_indeterminate(x) {
                return Err(Error::UndeclaredIndeterminate(x.clone()));
            }
            Ok(Some(Poly::var(x)))
        }
        DotLeft::Scalar(p) => {
            ws.check_indeterminates(p)?;
            Ok(Some(p.clone()))
        }
        DotLeft::Umbra(_) => Ok(None),
    }
}

/// `E[(beta)_i]`, the i-th lower-factorial moment.
pub fn falling_factorial_moment(ws: &Workspace, beta: AtomId, i: usize) -> Result<Poly> {
    let atom = ws.try_atom(beta)?;
    if atom.kind == AtomKind::BellScalar {
        return Ok(Poly::one());
    }
    let mut acc = Poly::zero();
    for j in 0..=i {
        let s = stirling(StirlingKind::FirstSigned, i, j)?;
        if !s.is_zero() {
            acc += &atom.moment(j)?.scale(&s);
        }
    }
    Ok(acc)
}

/// Point product `left.alpha`.
pub fn dot(ws: &mut Workspace, left: &DotLeft, alpha: AtomId) -> Result<AtomId> {
    ws.try_atom(alpha)?;
    let mut order = ws.atom(alpha).order();
    if let DotLeft::Umbra(beta) = left {
        ws.try_atom(*beta)?;
        order = order.min(ws.atom(*beta).order());
    }
    let a = moments_upto(ws, alpha, order);
    let table = PartialBellTable::new(&a[1..], order);
    let f = egf_upto(ws, alpha, order);

    let (weights, egf) = match (scalar_value(ws, left)?, left) {
        (Some(p), DotLeft::Int(n)) => {
            let w: Vec<Poly> = (0..=order).map(|i| p.falling_factorial(i)).collect();
            (w, f.pow_int(*n)?)
        }
        (Some(p), _) => {
            let w: Vec<Poly> = (0..=order).map(|i| p.falling_factorial(i)).collect();
            (w, f.pow_poly(&p)?)
        }
        (None, DotLeft::Umbra(beta)) => {
            let w = (0..=order)
                .map(|i| falling_factorial_moment(ws, *beta, i))
                .collect::<Result<Vec<_>>>()?;
            let g = egf_upto(ws, *beta, order);
            (w, g.compose(&f.log()?)?)
        }
        (None, _) => unreachable!("scalar_value returns None only for umbrae"),
    };
    let moments: Vec<Poly> = (0..=order).map(|k| table.weighted(k, &weights)).collect();
    let name = format!("{}.{}", display_name(ws, left), ws.atom(alpha).name);
    ws.register(&name, moments, egf, AtomKind::Plain)
}

/// Point power `alpha^.n`: the k-th moment is `a_k^n`.
pub fn point_power(ws: &mut Workspace, alpha: AtomId, n: i64) -> Result<AtomId> {
    let atom = ws.try_atom(alpha)?.clone();
    let mut moments = Vec::with_capacity(atom.moments.len());
    for (k, m) in atom.moments.iter().enumerate() {
        let base = if n < 0 {
            if m.is_zero() {
                return Err(Error::ZeroMomentReciprocal(k));
            }
            m.inverse().ok_or_else(|| {
                Error::Domain(format!("moment {k} = {m} has no reciprocal in the coefficient ring"))
            })?
        } else {
            m.clone()
        };
        moments.push(base.pow(n.unsigned_abs() as u32));
    }
    let egf = Series::from_moments(&moments);
    let name = format!("{}^.{}", atom.name, n);
    ws.register(&name, moments, egf, AtomKind::Plain)
}

/// The inverse umbra: `alpha + inverse ≡ eps`, generating function `1/f`.
pub fn inverse_umbra(ws: &mut Workspace, alpha: AtomId) -> Result<AtomId> {
    let atom = ws.try_atom(alpha)?;
    let egf = atom.egf.pow_int(-1)?;
    let moments = egf.moments();
    let name = format!("inv({})", atom.name);
    ws.register(&name, moments, egf, AtomKind::Plain)
}

/// Bell scalar umbra (no scale) or Bell polynomial umbra `x.beta`.
pub fn bell_umbra(ws: &mut Workspace, scale: Option<&DotLeft>) -> Result<AtomId> {
    let order = ws.order();
    let exp_minus_one = Series::exp_t(order).sub(&Series::one(order))?;
    match scale {
        None => {
            let moments: Vec<Poly> = (0..=order).map(|k| Poly::constant(bell_number(k))).collect();
            let egf = exp_minus_one.exp()?;
            ws.register("bell", moments, egf, AtomKind::BellScalar)
        }
        Some(DotLeft::Umbra(_)) => Err(Error::InvalidScale(
            "bell(·) takes an integer or an indeterminate; use gamma.bell for umbral scales".into(),
        )),
        Some(left) => {
            let p = scalar_value(ws, left)?.expect("scalar scale");
            let moments: Vec<Poly> = (0..=order).map(|k| exponential_poly_at(k, &p)).collect();
            let egf = exp_minus_one.scalar_mul(&p).exp()?;
            let kind = if p.is_one() { AtomKind::BellScalar } else { AtomKind::Plain };
            ws.register(&format!("bell({left})"), moments, egf, kind)
        }
    }
}

/// The alpha-partition umbra `beta.alpha`, or `x.beta.alpha` with a scalar scale.
/// An umbral scale `gamma` yields the composition umbra `gamma.beta.alpha`.
pub fn partition_umbra(ws: &mut Workspace, alpha: AtomId, scale: Option<&DotLeft>) -> Result<AtomId> {
    ws.try_atom(alpha)?;
    if let Some(DotLeft::Umbra(gamma)) = scale {
        return composition_umbra(ws, *gamma, alpha);
    }
    let order = ws.atom(alpha).order();
    let a = moments_upto(ws, alpha, order);
    let table = PartialBellTable::new(&a[1..], order);
    let h = delta_part(ws, alpha, order);
    let name = ws.atom(alpha).name.clone();
    match scale {
        None => {
            let moments: Vec<Poly> = (0..=order).map(|n| table.complete(n)).collect();
            let egf = h.exp()?;
            ws.register(&format!("part({name})"), moments, egf, AtomKind::Plain)
        }
        Some(left) => {
            let p = scalar_value(ws, left)?.expect("scalar scale");
            let mut weights = Vec::with_capacity(order + 1);
            let mut power = Poly::one();
            for _ in 0..=order {
                weights.push(power.clone());
                power = &power * &p;
            }
            let moments: Vec<Poly> = (0..=order).map(|n| table.weighted(n, &weights)).collect();
            let egf = h.scalar_mul(&p).exp()?;
            ws.register(&format!("part({name},{left})"), moments, egf, AtomKind::Plain)
        }
    }
}

/// The composition umbra `gamma.beta.alpha`, with generating function `g[f - 1]`.
pub fn composition_umbra(ws: &mut Workspace, gamma: AtomId, alpha: AtomId) -> Result<AtomId> {
    ws.try_atom(gamma)?;
    ws.try_atom(alpha)?;
    let order = common_order(ws, &[gamma, alpha]);
    let a = moments_upto(ws, alpha, order);
    let g = moments_upto(ws, gamma, order);
    let table = PartialBellTable::new(&a[1..], order);
    let moments: Vec<Poly> = (0..=order).map(|n| table.weighted(n, &g)).collect();
    let egf = egf_upto(ws, gamma, order).compose(&delta_part(ws, alpha, order))?;
    let name = format!("comp({},{})", ws.atom(gamma).name, ws.atom(alpha).name);
    ws.register(&name, moments, egf, AtomKind::Plain)
}

/// The umbra `alpha-bar` with moments `a_{n+1} / (a_1 (n+1))`.
///
/// Its order is one less than that of `alpha`, since the top moment of
/// `alpha-bar` needs `a_{N+1}`.
pub fn alpha_bar(ws: &mut Workspace, alpha: AtomId) -> Result<AtomId> {
    let atom = ws.try_atom(alpha)?.clone();
    if atom.order() == 0 {
        return Err(Error::OrderExceeded {
            requested: 1,
            available: 0,
        });
    }
    let a1 = &atom.moments[1];
    let a1_inv = a1
        .inverse()
        .ok_or_else(|| Error::NonUnitLinearMoment(a1.to_string()))?;
    let order = atom.order() - 1;
    let moments: Vec<Poly> = (0..=order)
        .map(|n| (&atom.moments[n + 1] * &a1_inv).scale(&int(n as i64 + 1).recip()))
        .collect();
    // (f - 1) / (a_1 t)
    let egf = atom
        .egf
        .sub(&Series::one(atom.order()))?
        .shift_down()
        .scalar_mul(&a1_inv);
    ws.register(&format!("bar({})", atom.name), moments, egf, AtomKind::Plain)
}

/// `Phi_n(alpha) = sum_k S(n,k) a_k`, the n-th moment of `alpha.beta`.
pub fn exponential_umbral_moment(ws: &Workspace, alpha: AtomId, n: usize) -> Result<Poly> {
    let atom = ws.try_atom(alpha)?;
    if n > atom.order() {
        return Err(Error::OrderExceeded {
            requested: n,
            available: atom.order(),
        });
    }
    let mut acc = Poly::zero();
    for k in 0..=n {
        acc += &atom.moments[k].scale(&stirling(StirlingKind::Second, n, k)?);
    }
    Ok(acc)
}

/// The Bernoulli umbra `delta`, with generating function `t / (e^t - 1)`.
pub fn bernoulli_umbra(ws: &mut Workspace) -> Result<AtomId> {
    let order = ws.order();
    // sum_{j<=n} C(n+1, j) B_j = 0 for n >= 1
    let mut b: Vec<Rational> = vec![int(1)];
    for n in 1..=order {
        let s = (0..n).fold(Rational::zero(), |acc, j| acc + binomial(n + 1, j) * &b[j]);
        b.push(-s / binomial(n + 1, n));
    }
    let moments = b.into_iter().map(Poly::constant).collect();
    ws.register("bern", moments, bernoulli_series(order), AtomKind::Plain)
}

/// `c alpha` as an atom: moments `c^k a_k`, generating function `f(c t)`.
pub fn scale_umbra(ws: &mut Workspace, alpha: AtomId, c: &Poly) -> Result<AtomId> {
    ws.check_indeterminates(c)?;
    let atom = ws.try_atom(alpha)?.clone();
    let mut power = Poly::one();
    let mut moments = Vec::with_capacity(atom.moments.len());
    for m in &atom.moments {
        moments.push(m * &power);
        power = &power * c;
    }
    let egf = atom.egf.dilate(c);
    ws.register(&format!("({c})*{}", atom.name), moments, egf, AtomKind::Plain)
}

/// Registers an umbral polynomial as an atom with the moments `E[e^k]`.
///
/// Atoms are returned unchanged. The order is the largest `k` for which every
/// required moment is stored.
pub fn materialize(ws: &mut Workspace, e: &UmbralExpr, name: &str) -> Result<AtomId> {
    if let UmbralExpr::Atom(id) = e {
        ws.try_atom(*id)?;
        return Ok(*id);
    }
    let mut moments = Vec::new();
    for k in 0..=ws.order() {
        match ws.eval(e, k) {
            Ok(m) => moments.push(m),
            Err(Error::OrderExceeded { .. }) if k > 0 => break,
            Err(err) => return Err(err),
        }
    }
    let egf = Series::from_moments(&moments);
    ws.register(name, moments, egf, AtomKind::Plain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::umbra::{EPSILON, UNITY};

    fn moments_of(ws: &Workspace, id: AtomId) -> Vec<Poly> {
        ws.atom(id).moments.clone()
    }

    fn ints(values: &[i64]) -> Vec<Poly> {
        values.iter().map(|&v| Poly::from_int(v)).collect()
    }

    #[test]
    fn integer_dot_of_unity() {
        let mut ws = Workspace::new(8);
        let three_u = dot(&mut ws, &DotLeft::Int(3), UNITY).unwrap();
        for k in 0..=8 {
            assert_eq!(ws.atom(three_u).moments[k], Poly::from_int(3i64.pow(k as u32)));
        }
        let zero = dot(&mut ws, &DotLeft::Int(0), UNITY).unwrap();
        assert!(ws.similar_to(zero, EPSILON));
    }

    #[test]
    fn umbral_dot_of_bell_with_unity_gives_bell_numbers() {
        let mut ws = Workspace::new(10);
        let bell = bell_umbra(&mut ws, None).unwrap();
        let d = dot(&mut ws, &DotLeft::Umbra(bell), UNITY).unwrap();
        assert!(ws.similar_to(d, bell));
        assert_eq!(ws.atom(d).moments[5], Poly::from_int(52));
    }

    #[test]
    fn undeclared_indeterminate_is_rejected() {
        let mut ws = Workspace::new(4);
        assert_eq!(
            dot(&mut ws, &DotLeft::Indet("x".into()), UNITY),
            Err(Error::UndeclaredIndeterminate("x".into()))
        );
        assert_eq!(
            bell_umbra(&mut ws, Some(&DotLeft::Indet("y".into()))),
            Err(Error::UndeclaredIndeterminate("y".into()))
        );
    }

    #[test]
    fn point_power_examples() {
        let mut ws = Workspace::new(6);
        let a = ws.define_umbra("a", ints(&[1, 2, 3, 5, 7, 11, 13])).unwrap();
        let p0 = point_power(&mut ws, a, 0).unwrap();
        assert!(ws.similar_to(p0, UNITY));
        let bell = bell_umbra(&mut ws, None).unwrap();
        let sq = point_power(&mut ws, bell, 2).unwrap();
        assert_eq!(ws.atom(sq).moments[3], Poly::from_int(25));
        let z = ws.define_umbra("z", ints(&[1, 0, 1, 1, 1, 1, 1])).unwrap();
        assert_eq!(point_power(&mut ws, z, -1), Err(Error::ZeroMomentReciprocal(1)));
        let inv = point_power(&mut ws, a, -2).unwrap();
        assert_eq!(ws.atom(inv).moments[2], Poly::constant(crate::poly::ratio(1, 9)));
    }

    #[test]
    fn inverse_examples() {
        let mut ws = Workspace::new(6);
        let e = inverse_umbra(&mut ws, EPSILON).unwrap();
        assert!(ws.similar_to(e, EPSILON));
        let iu = inverse_umbra(&mut ws, UNITY).unwrap();
        for k in 0..=6 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(ws.atom(iu).moments[k], Poly::from_int(sign));
        }
        assert!(ws.similar_to(UNITY + iu, EPSILON));
    }

    #[test]
    fn bell_umbra_examples() {
        let mut ws = Workspace::with_indeterminates(8, &["x"]);
        let b = bell_umbra(&mut ws, None).unwrap();
        assert_eq!(ws.eval(&b.into(), 3).unwrap(), Poly::from_int(5));
        for n in 0..=8 {
            // lower factorial moments straight from the stored moments
            let mut ff = Poly::zero();
            for j in 0..=n {
                ff += &ws.atom(b).moments[j]
                    .scale(&stirling(StirlingKind::FirstSigned, n, j).unwrap());
            }
            assert_eq!(ff, Poly::one());
        }
        let xb = bell_umbra(&mut ws, Some(&DotLeft::Indet("x".into()))).unwrap();
        let at_one: Vec<Poly> = moments_of(&ws, xb)
            .iter()
            .map(|m| m.substitute("x", &Poly::one()))
            .collect();
        assert_eq!(at_one, moments_of(&ws, b));
        assert!(matches!(
            bell_umbra(&mut ws, Some(&DotLeft::Umbra(b))),
            Err(Error::InvalidScale(_))
        ));
    }

    #[test]
    fn partition_and_composition_of_unity() {
        let mut ws = Workspace::new(8);
        let b = bell_umbra(&mut ws, None).unwrap();
        let p = partition_umbra(&mut ws, UNITY, None).unwrap();
        assert!(ws.similar_to(p, b));
        let c = composition_umbra(&mut ws, UNITY, UNITY).unwrap();
        assert!(ws.similar_to(c, b));
    }

    #[test]
    fn alpha_bar_examples() {
        let mut ws = Workspace::new(6);
        let ub = alpha_bar(&mut ws, UNITY).unwrap();
        for n in 0..=5 {
            assert_eq!(
                ws.atom(ub).moments[n],
                Poly::constant(crate::poly::ratio(1, n as i64 + 1))
            );
        }
        assert_eq!(ws.atom(ub).order(), 5);
        let z = ws.define_umbra("z", ints(&[1, 0, 1, 1, 1, 1, 1])).unwrap();
        assert!(matches!(alpha_bar(&mut ws, z), Err(Error::NonUnitLinearMoment(_))));
    }

    #[test]
    fn tree_function_alpha_bar_is_negative_unity() {
        // f - 1 = t e^{-t}: a_n = n (-1)^{n-1}
        let mut ws = Workspace::new(8);
        let a: Vec<Poly> = (0..=8i64)
            .map(|n| if n == 0 { Poly::one() } else { Poly::from_int(n * if n % 2 == 1 { 1 } else { -1 }) })
            .collect();
        let alpha = ws.define_umbra("a", a).unwrap();
        let bar = alpha_bar(&mut ws, alpha).unwrap();
        let neg_u = dot(&mut ws, &DotLeft::Int(-1), UNITY).unwrap();
        assert!(ws.similar_to(bar, neg_u));
    }

    #[test]
    fn exponential_umbral_moment_examples() {
        let mut ws = Workspace::new(6);
        for n in 0..=6 {
            assert_eq!(
                exponential_umbral_moment(&ws, UNITY, n).unwrap(),
                Poly::constant(bell_number(n))
            );
            let expected = if n == 0 { Poly::one() } else { Poly::zero() };
            assert_eq!(exponential_umbral_moment(&ws, EPSILON, n).unwrap(), expected);
        }
        assert!(matches!(
            exponential_umbral_moment(&ws, UNITY, 7),
            Err(Error::OrderExceeded { .. })
        ));
        let bern = bernoulli_umbra(&mut ws).unwrap();
        assert_eq!(ws.atom(bern).moments[1], Poly::constant(crate::poly::ratio(-1, 2)));
    }

    #[test]
    fn materialize_and_scale() {
        let mut ws = Workspace::new(5);
        let a = ws.define_umbra("a", ints(&[1, 2, 3, 4, 5, 6])).unwrap();
        assert_eq!(materialize(&mut ws, &a.into(), "same").unwrap(), a);
        let b = ws.clone_atom(a);
        let sum = materialize(&mut ws, &(a + b), "a+a'").unwrap();
        let two = dot(&mut ws, &DotLeft::Int(2), a).unwrap();
        assert!(ws.similar_to(sum, two));
        let prod = materialize(&mut ws, &(a * b), "a*a'").unwrap();
        assert_eq!(ws.atom(prod).order(), 5);
        let sq = materialize(&mut ws, &UmbralExpr::from(a).pow(2), "a^2").unwrap();
        assert_eq!(ws.atom(sq).order(), 2);
        let s = scale_umbra(&mut ws, a, &Poly::from_int(2)).unwrap();
        assert_eq!(ws.atom(s).moments[3], Poly::from_int(32));
    }
}
