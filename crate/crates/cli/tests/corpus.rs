mod common;

use common::{check_entry, CORPUS};
use proptest::prelude::*;
use umbral_cli::ast::{DotLhs, Expr, Func};
use umbral_cli::parse::parse_expr;
use umbral_core::Rational;

#[test]
fn corpus_round_trips_and_evaluates() {
    assert!(CORPUS.len() >= 20);
    let failures: Vec<String> = CORPUS.iter().filter_map(|e| check_entry(e).err()).collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        ("[abgxy]", 0usize..3).prop_map(|(name, primes)| Expr::Atom { name, primes }),
        (0i64..20, 1i64..5).prop_map(|(p, q)| Expr::Number(Rational::new(p.into(), q.into()))),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        let b = || inner.clone().prop_map(Box::new);
        prop_oneof![
            (b(), b()).prop_map(|(x, y)| Expr::Sum(x, y)),
            (b(), b()).prop_map(|(x, y)| Expr::Diff(x, y)),
            b().prop_map(Expr::Neg),
            (b(), b()).prop_map(|(x, y)| Expr::Product(x, y)),
            (b(), 0u32..5).prop_map(|(x, n)| Expr::Power(x, n)),
            (b(), 0u32..5).prop_map(|(x, n)| Expr::PointPower(x, n)),
            (0u64..5, b()).prop_map(|(n, x)| Expr::Dot(DotLhs::Int(n), x)),
            ("[abgxy]", 0usize..2, b())
                .prop_map(|(name, primes, x)| Expr::Dot(DotLhs::Ident { name, primes }, x)),
            (b(), b()).prop_map(|(l, x)| Expr::Dot(DotLhs::Group(l), x)),
            inner.clone().prop_map(|x| Expr::Call(Func::Inv, vec![x])),
            inner.clone().prop_map(|x| Expr::Call(Func::Bar, vec![x])),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Call(Func::Comp, vec![x, y])),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Call(Func::Part, vec![x, y])),
        ]
    })
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(e in expr()) {
        let text = e.to_string();
        let back = parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, e, "{}", text);
    }
}
