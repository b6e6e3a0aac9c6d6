//! Acceptance suite: one line per criterion, nonzero exit if any is red.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use umbral_core::combinatorics::{
    bell_number, complete_bell, exponential_poly_at, partial_bell_by_enumeration,
};
use umbral_core::identities::{check_all, dobinski_bracket, Overrides};
use umbral_core::inversion::{atom_from_delta_series, revert_oracle, revert_umbral};
use umbral_core::ops::{
    alpha_bar, bell_umbra, bernoulli_umbra, composition_umbra, dot, inverse_umbra, materialize,
    partition_umbra, point_power, scale_umbra, DotLeft,
};
use umbral_core::poly::{format_rational, int, parse_rational, ratio, rational_to_f64};
use umbral_core::random::UmbraSampler;
use umbral_core::series::{binomial, factorial};
use umbral_core::{AtomId, Poly, Series, UmbralExpr, Workspace};
use umbral_lab::{compare, DiscreteDist, Model};

type Verdict = Result<String, String>;

/// Name, check, and runtime budget in seconds.
type Criterion = (&'static str, fn() -> Verdict, Option<f64>);

fn coherence() -> Verdict {
    const UMBRAE: usize = 50;
    const ORDER: usize = 12;
    let mut sampler = UmbraSampler::new(20_240_601);
    let mut checked = 0usize;
    for i in 0..UMBRAE {
        let mut ws = Workspace::with_indeterminates(ORDER, &["x"]);
        let a = sampler.define_invertible(&mut ws, "a").map_err(|e| e.to_string())?;
        let g = sampler.define(&mut ws, "g").map_err(|e| e.to_string())?;
        let x = DotLeft::Indet("x".into());
        let half = Poly::constant(ratio(1, 2));
        let built: Vec<(&str, umbral_core::Result<AtomId>)> = vec![
            ("3.a", dot(&mut ws, &DotLeft::Int(3), a)),
            ("-2.a", dot(&mut ws, &DotLeft::Int(-2), a)),
            ("x.a", dot(&mut ws, &x, a)),
            ("(1/2).a", dot(&mut ws, &DotLeft::Scalar(half.clone()), a)),
            ("g.a", dot(&mut ws, &DotLeft::Umbra(g), a)),
            ("a^.2", point_power(&mut ws, a, 2)),
            ("inv(a)", inverse_umbra(&mut ws, a)),
            ("bell", bell_umbra(&mut ws, None)),
            ("bell(x)", bell_umbra(&mut ws, Some(&x))),
            ("part(a)", partition_umbra(&mut ws, a, None)),
            ("part(a, x)", partition_umbra(&mut ws, a, Some(&x))),
            ("comp(g, a)", composition_umbra(&mut ws, g, a)),
            ("bar(a)", alpha_bar(&mut ws, a)),
            ("bern", bernoulli_umbra(&mut ws)),
            ("(1/2)*a", scale_umbra(&mut ws, a, &half)),
            (
                "a + g'",
                {
                    let g2 = ws.clone_atom(g);
                    materialize(&mut ws, &UmbralExpr::Sum(vec![a.into(), g2.into()]), "a + g'")
                },
            ),
        ];
        for (label, id) in built {
            let id = id.map_err(|e| format!("umbra {i}, {label}: {e}"))?;
            let atom = ws.atom(id);
            for k in 0..=atom.order() {
                let from_series = atom.egf.coeff(k).scale(&factorial(k));
                if from_series != atom.moments[k] {
                    return Err(format!("umbra {i}, {label}, k = {k}: {from_series} vs {}", atom.moments[k]));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{UMBRAE} umbrae x 16 constructors, {checked} moments exact"))
}

fn catalog() -> Verdict {
    let cases = check_all(&Overrides::default()).map_err(|e| e.to_string())?;
    let failed: Vec<&str> = cases.iter().filter(|c| !c.result.passed()).map(|c| c.id.as_str()).collect();
    if !failed.is_empty() {
        return Err(format!("failed: {}", failed.join(", ")));
    }
    let counter = cases.iter().filter(|c| c.counterexample).count();
    Ok(format!("{} entries pass ({counter} designed counterexample)", cases.len()))
}

fn bell_chain() -> Verdict {
    let mut ws = Workspace::new(12);
    let beta = bell_umbra(&mut ws, None).map_err(|e| e.to_string())?;
    let ones = vec![Poly::one(); 12];
    for n in 0..=12 {
        let umbral = ws.eval(&beta.into(), n).map_err(|e| e.to_string())?;
        let number = Poly::constant(bell_number(n));
        let complete = complete_bell(n, &ones).map_err(|e| e.to_string())?;
        let enumerated = if n == 0 {
            Poly::one()
        } else {
            (1..=n).try_fold(Poly::zero(), |acc, k| {
                partial_bell_by_enumeration(n, k, &ones).map(|p| acc + p)
            })
            .map_err(|e| e.to_string())?
        };
        if umbral != number || complete != number || enumerated != number {
            return Err(format!("n = {n}: {umbral}, {number}, {complete}, {enumerated}"));
        }
    }
    let b5 = format_rational(&bell_number(5));
    if b5 != "52" {
        return Err(format!("B_5 = {b5}"));
    }
    Ok("E[bell^n] = B_n = Y_n(1,...) = #partitions for n <= 12".into())
}

fn lagrange() -> Verdict {
    const ORDER: usize = 10;
    let err = |e: umbral_core::Error| e.to_string();
    let mut sampler = UmbraSampler::new(8_675_309);
    for i in 0..20 {
        let mut ws = Workspace::new(ORDER);
        let a = sampler.define_invertible(&mut ws, "a").map_err(err)?;
        let umbral = revert_umbral(&mut ws, a).map_err(err)?;
        let oracle = revert_oracle(&mut ws, a).map_err(err)?;
        if ws.atom(umbral).moments != ws.atom(oracle).moments {
            return Err(format!("random umbra {i}: umbral and oracle inverses differ"));
        }
        for chi in [composition_umbra(&mut ws, umbral, a), composition_umbra(&mut ws, a, umbral)] {
            let chi = chi.map_err(err)?;
            if !is_identity(&ws.atom(chi).moments) {
                return Err(format!("random umbra {i}: composition is not the identity"));
            }
        }
    }
    let mut ws = Workspace::new(ORDER);
    let t = Series::t(ORDER);
    let h = t.mul(&t.neg().exp().map_err(err)?).map_err(err)?;
    let alpha = atom_from_delta_series(&mut ws, &h, "1 + t exp(-t)").map_err(err)?;
    let gamma = revert_umbral(&mut ws, alpha).map_err(err)?;
    for k in 1..=ORDER {
        let want = Poly::from_int((k as i64).pow(k as u32 - 1));
        if ws.atom(gamma).moments[k] != want {
            return Err(format!("tree function: gamma^{k} = {}", ws.atom(gamma).moments[k]));
        }
    }
    let chi = composition_umbra(&mut ws, gamma, alpha).map_err(err)?;
    if !is_identity(&ws.atom(chi).moments) {
        return Err("tree function: chi moments are not (1, 1, 0, ...)".into());
    }
    Ok("20 random umbrae agree with the oracle at order 10; gamma^k = k^(k-1) for k <= 10; chi = (1, 1, 0, ...)".into())
}

fn is_identity(moments: &[Poly]) -> bool {
    moments
        .iter()
        .enumerate()
        .all(|(k, m)| *m == if k <= 1 { Poly::one() } else { Poly::zero() })
}

fn stirling_bernoulli() -> Verdict {
    let err = |e: umbral_core::Error| e.to_string();
    let mut ws = Workspace::new(10);
    let iota = bernoulli_umbra(&mut ws).map_err(err)?;
    let ones = vec![Poly::one(); 10];
    for k in 0..=10usize {
        let neg = dot(&mut ws, &DotLeft::Int(-(k as i64)), iota).map_err(err)?;
        for n in k..=10 {
            let umbral = ws.eval(&neg.into(), n - k).map_err(err)?.scale(&binomial(n, k));
            let enumerated = match (n, k) {
                (0, 0) => Poly::one(),
                (_, 0) => Poly::zero(),
                _ => partial_bell_by_enumeration(n, k, &ones).map_err(err)?,
            };
            if umbral != enumerated {
                return Err(format!("S({n},{k}): {umbral} vs {enumerated}"));
            }
        }
    }
    Ok("S(n,k) = C(n,k) E[(-k.bern)^(n-k)] for 0 <= k <= n <= 10".into())
}

fn dobinski() -> Verdict {
    for n in 0..=8 {
        let b = dobinski_bracket(n).map_err(|e| e.to_string())?;
        let parse = |s: &str| parse_rational(s).map_err(|e| e.to_string());
        let (lower, upper, tail) = (parse(&b.lower)?, parse(&b.upper)?, parse(&b.tail_bound)?);
        let bell = bell_number(n);
        if !(lower <= bell && bell <= upper) {
            return Err(format!("n = {n}: B_n outside [{}, {}]", b.lower, b.upper));
        }
        if rational_to_f64(&(tail / &bell)) >= 1e-6 || !b.holds() {
            return Err(format!("n = {n}: bracket too wide or rounds to {}", b.rounded));
        }
    }
    Ok("B_n bracketed, tail < 1e-6 relative, rounded midpoint exact for n <= 8".into())
}

fn monte_carlo() -> Verdict {
    const N: usize = 1_000_000;
    const MAX_ORDER: usize = 4;
    let dist = |s: &str| s.parse::<DiscreteDist>().map_err(|e| e.to_string());
    let models = [
        Model::Poisson { lambda: int(1) },
        Model::Poisson { lambda: int(2) },
        Model::Compound { lambda: int(1), jumps: dist("1:1/2,2:1/2")? },
        Model::Randomized { param: dist("1:1/2,3:1/2")? },
    ];
    let mut worst = 0.0f64;
    for (i, model) in models.iter().enumerate() {
        let report = compare(model, N, 42 + i as u64, MAX_ORDER).map_err(|e| e.to_string())?;
        if !report.passed() {
            return Err(format!("{model}: max |z| = {:.2}", report.max_abs_z()));
        }
        worst = worst.max(report.max_abs_z());
    }
    for (k, row) in compare(&models[0], 1000, 1, MAX_ORDER).map_err(|e| e.to_string())?.rows.iter().enumerate() {
        if row.prediction != format_rational(&bell_number(k + 1)) {
            return Err(format!("poisson(1) prediction k = {} is {}", k + 1, row.prediction));
        }
    }
    let two = Poly::from_int(2);
    let predicted = models[1].predictions(MAX_ORDER).map_err(|e| e.to_string())?;
    for (k, p) in predicted.iter().enumerate() {
        if Some(p.clone()) != exponential_poly_at(k, &two).as_constant() {
            return Err(format!("poisson(2) prediction k = {k} is {}", format_rational(p)));
        }
    }
    Ok(format!("4 models, n = 10^6, k <= 4, max |z| = {worst:.2} <= 8"))
}

fn cli() -> Verdict {
    let failures: Vec<String> = common::CORPUS.iter().filter_map(|e| common::check_entry(e).err()).collect();
    if !failures.is_empty() {
        return Err(failures.join("; "));
    }
    let flags = common::workspace_flags();
    for entry in common::CORPUS {
        let out = Command::new(env!("CARGO_BIN_EXE_umbral"))
            .args(["eval", entry.src])
            .args(&flags)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("umbral eval {:?} exited {}", entry.src, out.status));
        }
    }
    let out = Command::new(env!("CARGO_BIN_EXE_umbral"))
        .args(["check", "all"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("`umbral check all` exited {}", out.status));
    }
    Ok(format!("{} corpus expressions round-trip and evaluate; `check all` exits 0", common::CORPUS.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("coherence sweep", coherence, Some(60.0)),
        ("identity catalog", catalog, None),
        ("Bell chain", bell_chain, None),
        ("Lagrange inversion", lagrange, None),
        ("Stirling-Bernoulli", stirling_bernoulli, None),
        ("Dobinski bracket", dobinski, None),
        ("Monte Carlo lab", monte_carlo, Some(120.0)),
        ("CLI round-trip", cli, None),
    ];
    let mut all = true;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut verdict = run();
        let secs = start.elapsed().as_secs_f64();
        if let (Ok(detail), Some(limit)) = (&verdict, budget) {
            if secs > *limit {
                verdict = Err(format!("{detail}, but took {secs:.1}s > {limit}s"));
            }
        }
        match verdict {
            Ok(detail) => println!("PASS  {}. {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                all = false;
                println!("FAIL  {}. {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
