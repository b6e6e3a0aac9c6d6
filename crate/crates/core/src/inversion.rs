//! Lagrange inversion through the umbra `alpha-bar`.
//!
//! For `f = e^{alpha t}` with invertible `a_1`, the compositional inverse
//! `g` (with `g[f - 1] = f[g - 1] = 1 + t`) has moments
//! `g_k = E[(-k.alpha-bar)^(k-1)] / a_1^k`. [`revert_oracle`] computes the
//! same umbra by solving coefficients of the series reversion directly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ops::{alpha_bar, composition_umbra, dot, DotLeft};
use crate::poly::Poly;
use crate::series::{binomial, Series};
use crate::umbra::{AtomId, AtomKind, UmbralExpr, Workspace};

fn linear_moment_inverse(ws: &Workspace, alpha: AtomId) -> Result<Poly> {
    let atom = ws.try_atom(alpha)?;
    let a1 = atom.moment(1)?;
    a1.inverse()
        .ok_or_else(|| Error::NonUnitLinearMoment(a1.to_string()))
}

/// `E[(-k.alpha-bar)^(k-1)]` for `k = 1..=order`, read off `pow_int(EGF(alpha-bar), -k)`
/// and checked against the lower-factorial moment formula of `-k.alpha-bar`.
fn negative_dot_moments(ws: &Workspace, bar: AtomId, order: usize) -> Result<Vec<Poly>> {
    let bar_atom = ws.atom(bar);
    let bar_moments = &bar_atom.moments;
    let mut out = Vec::with_capacity(order);
    for k in 1..=order {
        let via_series = bar_atom
            .egf
            .pow_int(-(k as i64))?
            .egf_moment(k - 1)?;
        let table = crate::combinatorics::PartialBellTable::new(&bar_moments[1..], k - 1);
        let minus_k = Poly::from_int(-(k as i64));
        let weights: Vec<Poly> = (0..k).map(|i| minus_k.falling_factorial(i)).collect();
        let via_moments = table.weighted(k - 1, &weights);
        if via_series != via_moments {
            return Err(Error::Incoherent {
                name: format!("-{k}.{}", bar_atom.name),
                order: k - 1,
                moment: via_moments.to_string(),
                series: via_series.to_string(),
            });
        }
        out.push(via_series);
    }
    Ok(out)
}

/// The compositional-inverse umbra `gamma` of `alpha`, by Lagrange inversion.
pub fn revert_umbral(ws: &mut Workspace, alpha: AtomId) -> Result<AtomId> {
    let a1_inv = linear_moment_inverse(ws, alpha)?;
    let order = ws.atom(alpha).order();
    let bar = alpha_bar(ws, alpha)?;
    let raw = negative_dot_moments(ws, bar, order)?;
    let mut moments = Vec::with_capacity(order + 1);
    moments.push(Poly::one());
    for (k, m) in raw.iter().enumerate() {
        moments.push(m * &a1_inv.pow(k as u32 + 1));
    }
    let egf = Series::from_moments(&moments);
    let name = format!("rev({})", ws.atom(alpha).name);
    ws.register(&name, moments, egf, AtomKind::Plain)
}

/// The inverse umbra with generating function `1 + revert(f - 1)`.
pub fn revert_oracle(ws: &mut Workspace, alpha: AtomId) -> Result<AtomId> {
    linear_moment_inverse(ws, alpha)?;
    let atom = ws.atom(alpha);
    let order = atom.order();
    let h = atom.egf.sub(&Series::one(order))?;
    let egf = h.revert()?.add(&Series::one(order))?;
    let moments = egf.moments();
    let name = format!("rev_oracle({})", atom.name);
    ws.register(&name, moments, egf, AtomKind::Plain)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InversionReport {
    pub order: usize,
    pub gamma_moments_umbral: Vec<Poly>,
    pub gamma_moments_oracle: Vec<Poly>,
    /// The umbral and oracle moments match exactly up to `order`.
    pub agree: bool,
    /// Moments of the composition umbra of the inverse pair.
    pub chi_moments: Vec<Poly>,
    /// `chi ≃ 1` and `chi^j ≃ 0` for `j >= 2`.
    pub chi_is_identity: bool,
    /// The Bell-polynomial expansion of `chi^n` through `alpha-bar` holds.
    pub bell_expansion_holds: bool,
    /// The Abel expansion of `chi^n` holds.
    pub abel_expansion_holds: bool,
    /// When `a_1 = 1`: `gamma^k ≃ (-k.alpha-bar)^(k-1)` and
    /// `k gamma-bar^(k-1) ≃ (-k.alpha-bar)^(k-1)`. `None` otherwise.
    pub normalized_form_holds: Option<bool>,
}

impl InversionReport {
    pub fn all_hold(&self) -> bool {
        self.agree
            && self.chi_is_identity
            && self.bell_expansion_holds
            && self.abel_expansion_holds
            && self.normalized_form_holds.unwrap_or(true)
    }
}

/// `E[(k.bar)^m]` with `0.bar ≡ eps`.
fn dot_bar_moment(ws: &Workspace, dots: &[AtomId], k: usize, m: usize) -> Result<Poly> {
    if k == 0 {
        return Ok(if m == 0 { Poly::one() } else { Poly::zero() });
    }
    Ok(ws.atom(dots[k]).moment(m)?.clone())
}

/// Computes the inverse both ways and checks the identities the umbral proof uses.
pub fn cross_check(ws: &mut Workspace, alpha: AtomId, order: usize) -> Result<InversionReport> {
    let available = ws.try_atom(alpha)?.order();
    if order > available {
        return Err(Error::OrderExceeded {
            requested: order,
            available,
        });
    }
    let gamma = revert_umbral(ws, alpha)?;
    let oracle = revert_oracle(ws, alpha)?;
    let umbral_m = ws.atom(gamma).moments[..=order].to_vec();
    let oracle_m = ws.atom(oracle).moments[..=order].to_vec();
    let agree = umbral_m == oracle_m;

    let chi = composition_umbra(ws, gamma, alpha)?;
    let chi_m = ws.atom(chi).moments[..=order].to_vec();
    let chi_is_identity = chi_m
        .iter()
        .enumerate()
        .all(|(j, m)| *m == if j <= 1 { Poly::one() } else { Poly::zero() });

    let bar = alpha_bar(ws, alpha)?;
    let mut dots = vec![ws.epsilon()];
    let mut neg_dots = vec![ws.epsilon()];
    for k in 1..=order {
        dots.push(dot(ws, &DotLeft::Int(k as i64), bar)?);
        neg_dots.push(dot(ws, &DotLeft::Int(-(k as i64)), bar)?);
    }
    let a1 = ws.atom(alpha).moments[1].clone();
    let g = &ws.atom(gamma).moments;

    // chi^n ≃ sum C(n,k) alpha^.k gamma^k (k.bar)^(n-k)
    let mut bell_expansion_holds = true;
    for n in 0..=order {
        let mut rhs = Poly::zero();
        for k in 0..=n {
            let term = &(&a1.pow(k as u32) * &g[k]) * &dot_bar_moment(ws, &dots, k, n - k)?;
            rhs += &term.scale(&binomial(n, k));
        }
        bell_expansion_holds &= rhs == chi_m[n];
    }

    // chi^n ≃ sum C(n,k) chi (chi - k.bar)^(k-1) (k.bar')^(n-k)
    let mut abel_expansion_holds = true;
    for n in 0..=order {
        let mut rhs = Poly::zero();
        for k in 0..=n {
            let head = if k == 0 {
                Poly::one()
            } else {
                let e = UmbralExpr::from(chi) * (UmbralExpr::from(chi) + neg_dots[k].into()).pow(k as u32 - 1);
                ws.eval(&e, 1)?
            };
            rhs += &(&head * &dot_bar_moment(ws, &dots, k, n - k)?).scale(&binomial(n, k));
        }
        abel_expansion_holds &= rhs == chi_m[n];
    }

    let normalized_form_holds = if a1.is_one() {
        let mut holds = true;
        let gamma_bar = alpha_bar(ws, gamma)?;
        for k in 1..=order {
            let rhs = ws.atom(neg_dots[k]).moment(k - 1)?.clone();
            holds &= ws.atom(gamma).moments[k] == rhs;
            let lhs = ws
                .atom(gamma_bar)
                .moment(k - 1)?
                .scale(&crate::poly::int(k as i64));
            holds &= lhs == rhs;
        }
        Some(holds)
    } else {
        None
    };

    Ok(InversionReport {
        order,
        gamma_moments_umbral: umbral_m,
        gamma_moments_oracle: oracle_m,
        agree,
        chi_moments: chi_m,
        chi_is_identity,
        bell_expansion_holds,
        abel_expansion_holds,
        normalized_form_holds,
    })
}

/// Atom whose generating function is `1 + h` for a delta series `h`.
pub fn atom_from_delta_series(ws: &mut Workspace, h: &Series, name: &str) -> Result<AtomId> {
    if !h.is_delta() {
        return Err(Error::Domain("expected a delta series (zero constant term)".into()));
    }
    let order = ws.order().min(h.order());
    let f = h.truncate(order)?.add(&Series::one(order))?;
    let moments = f.moments();
    ws.register(name, moments, f, AtomKind::Plain)
}

/// Moments `k^(k-1)` of the inverse of `t e^{-t}`, used in tests and docs.
pub fn tree_function_moments(order: usize) -> Vec<Poly> {
    (0..=order)
        .map(|k| {
            if k == 0 {
                Poly::one()
            } else {
                Poly::from_int((k as i64).pow(k as u32 - 1))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::UmbraSampler;

    fn tree_alpha(ws: &mut Workspace) -> AtomId {
        let order = ws.order();
        let h = Series::t(order)
            .mul(&Series::t(order).neg().exp().unwrap())
            .unwrap();
        atom_from_delta_series(ws, &h, "tree").unwrap()
    }

    #[test]
    fn tree_function_inverse() {
        let mut ws = Workspace::new(10);
        let a = tree_alpha(&mut ws);
        let g = revert_umbral(&mut ws, a).unwrap();
        let m = &ws.atom(g).moments;
        assert_eq!(m[1..5].to_vec(), [1, 2, 9, 64].map(Poly::from_int).to_vec());
        assert_eq!(*m, tree_function_moments(10));
        let report = cross_check(&mut ws, a, 10).unwrap();
        assert!(report.all_hold(), "{report:?}");
        assert_eq!(report.normalized_form_holds, Some(true));
        assert_eq!(report.chi_moments[..3], [Poly::one(), Poly::one(), Poly::zero()]);
    }

    #[test]
    fn identity_series_inverts_to_itself() {
        let mut ws = Workspace::new(8);
        let mut m = vec![Poly::zero(); 9];
        m[0] = Poly::one();
        m[1] = Poly::one();
        let a = ws.define_umbra("id", m.clone()).unwrap();
        let g = revert_umbral(&mut ws, a).unwrap();
        assert_eq!(ws.atom(g).moments, m);
        assert!(cross_check(&mut ws, a, 8).unwrap().all_hold());
    }

    #[test]
    fn random_umbrae_agree_with_oracle() {
        let mut sampler = UmbraSampler::new(11);
        for i in 0..5 {
            let mut ws = Workspace::new(8);
            let m = sampler.moments_invertible(8);
            let a = ws.define_umbra(&format!("r{i}"), m).unwrap();
            let report = cross_check(&mut ws, a, 8).unwrap();
            assert!(report.all_hold(), "{report:?}");
            assert_eq!(report.normalized_form_holds.is_some(), ws.atom(a).moments[1].is_one());
            let g = revert_umbral(&mut ws, a).unwrap();
            let back = revert_umbral(&mut ws, g).unwrap();
            assert!(ws.similar_to(back, a));
        }
    }

    #[test]
    fn non_invertible_linear_moment() {
        let mut ws = Workspace::new(4);
        let e = ws.epsilon();
        assert!(matches!(revert_umbral(&mut ws, e), Err(Error::NonUnitLinearMoment(_))));
        assert!(matches!(revert_oracle(&mut ws, e), Err(Error::NonUnitLinearMoment(_))));
    }
}
