use proptest::prelude::*;
use umbral_core::inversion::{revert_oracle, revert_umbral};
use umbral_core::ops::{dot, inverse_umbra, DotLeft};
use umbral_core::poly::ratio;
use umbral_core::series::binomial;
use umbral_core::{Poly, Rational, Series, UmbralExpr, Workspace};

const ORDER: usize = 6;

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(p, q)| ratio(p, q))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| *r != ratio(0, 1))
}

/// Polynomials in `x`, `y` of low degree.
fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((rational(), 0u32..3, 0u32..3), 0..4).prop_map(|terms| {
        terms.into_iter().fold(Poly::zero(), |acc, (c, i, j)| {
            acc + Poly::constant(c) * Poly::var("x").pow(i) * Poly::var("y").pow(j)
        })
    })
}

fn coeffs(first: Option<Rational>) -> impl Strategy<Value = Vec<Poly>> {
    prop::collection::vec(rational(), ORDER).prop_map(move |rest| {
        let mut c = vec![Poly::constant(first.clone().unwrap_or_else(|| ratio(1, 1)))];
        c.extend(rest.into_iter().map(Poly::constant));
        c
    })
}

fn unital() -> impl Strategy<Value = Series> {
    coeffs(None).prop_map(|c| Series::new(c, ORDER).unwrap())
}

/// Delta series with a nonzero linear coefficient.
fn delta() -> impl Strategy<Value = Series> {
    (coeffs(Some(ratio(0, 1))), nonzero_rational()).prop_map(|(mut c, a1)| {
        c[1] = Poly::constant(a1);
        Series::new(c, ORDER).unwrap()
    })
}

fn workspace_with(moments: Vec<Poly>) -> (Workspace, umbral_core::AtomId) {
    let mut ws = Workspace::new(ORDER);
    let id = ws.define_umbra("a", moments).unwrap();
    (ws, id)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_ring_laws(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(p.clone() + q.clone(), q.clone() + p.clone());
        prop_assert_eq!(p.clone() * q.clone(), q.clone() * p.clone());
        prop_assert_eq!((p.clone() * q.clone()) * r.clone(), p.clone() * (q.clone() * r.clone()));
        prop_assert_eq!(p.clone() * (q.clone() + r.clone()), p.clone() * q.clone() + p.clone() * r.clone());
        prop_assert_eq!(p.clone() - p.clone(), Poly::zero());
    }

    #[test]
    fn polynomial_text_round_trip(p in poly()) {
        prop_assert_eq!(p.to_string().parse::<Poly>().unwrap(), p);
    }

    #[test]
    fn integer_powers_add(f in unital(), m in -4i64..4, n in -4i64..4) {
        let lhs = f.pow_int(m).unwrap().mul(&f.pow_int(n).unwrap()).unwrap();
        prop_assert_eq!(lhs, f.pow_int(m + n).unwrap());
    }

    #[test]
    fn exp_and_log_are_inverse(f in unital(), h in delta()) {
        prop_assert_eq!(f.log().unwrap().exp().unwrap(), f);
        prop_assert_eq!(h.exp().unwrap().log().unwrap(), h);
    }

    #[test]
    fn reversion_inverts_composition(h in delta()) {
        let r = h.revert().unwrap();
        prop_assert_eq!(h.compose(&r).unwrap(), Series::t(ORDER));
        prop_assert_eq!(r.compose(&h).unwrap(), Series::t(ORDER));
    }

    #[test]
    fn umbral_inverse_matches_oracle(h in delta()) {
        let f = h.add(&Series::one(ORDER)).unwrap();
        let (mut ws, a) = workspace_with(f.moments());
        let umbral = revert_umbral(&mut ws, a).unwrap();
        let oracle = revert_oracle(&mut ws, a).unwrap();
        prop_assert_eq!(&ws.atom(umbral).moments, &ws.atom(oracle).moments);
    }

    #[test]
    fn clones_are_uncorrelated(m in coeffs(None), k in 0usize..=ORDER) {
        let (mut ws, a) = workspace_with(m.clone());
        let a2 = ws.clone_atom(a);
        let sum = UmbralExpr::Sum(vec![a.into(), a2.into()]);
        let want = (0..=k).fold(Poly::zero(), |acc, j| {
            acc + (&m[j] * &m[k - j]).scale(&binomial(k, j))
        });
        prop_assert_eq!(ws.eval(&sum, k).unwrap(), want.clone());
        let two = dot(&mut ws, &DotLeft::Int(2), a).unwrap();
        prop_assert_eq!(ws.eval(&two.into(), k).unwrap(), want);
    }

    #[test]
    fn inverse_umbra_cancels(m in coeffs(None)) {
        let (mut ws, a) = workspace_with(m);
        let inv = inverse_umbra(&mut ws, a).unwrap();
        let sum = UmbralExpr::Sum(vec![a.into(), inv.into()]);
        let eps = ws.epsilon();
        prop_assert!(ws.similar_to(sum, eps));
    }
}
