#![allow(dead_code)]

use umbral_cli::parse::parse_query;
use umbral_cli::resolve::Resolver;
use umbral_core::random::UmbraSampler;
use umbral_core::umbra::render_moments;
use umbral_core::{Poly, Workspace};

pub const ORDER: usize = 8;

pub enum Expect {
    /// `E[expr^k]` has this value.
    Value(usize, &'static str),
    SimilarTo(&'static str),
    DissimilarTo(&'static str),
}

pub struct Entry {
    pub src: &'static str,
    pub expect: Expect,
}

const fn value(src: &'static str, k: usize, v: &'static str) -> Entry {
    Entry { src, expect: Expect::Value(k, v) }
}

const fn similar(src: &'static str, other: &'static str) -> Entry {
    Entry { src, expect: Expect::SimilarTo(other) }
}

const fn dissimilar(src: &'static str, other: &'static str) -> Entry {
    Entry { src, expect: Expect::DissimilarTo(other) }
}

/// Displayed identities and examples in umbral notation. `a`, `b`, `g` are
/// random umbrae, `x`, `y` indeterminates.
pub const CORPUS: &[Entry] = &[
    value("E[(3.u)^2]", 1, "9"),
    value("E[bell^3]", 1, "5"),
    value("E[bell]", 5, "52"),
    value("E[x.bell]", 3, "x^3 + 3*x^2 + x"),
    value("E[(-2.bern)^3]", 1, "3/2"),
    value("E[u^.3]", 4, "1"),
    value("E[a + inv(a)]", 3, "0"),
    similar("2.a", "a + a'"),
    similar("(a + 2.b)", "a + b + b'"),
    similar("a - a", "eps"),
    similar("-1.a", "inv(a)"),
    similar("(x + y).a", "x.a + y.a"),
    similar("x.y.a", "(x*y).a"),
    similar("bell(x)", "x.bell"),
    similar("bell(2)", "2.bell"),
    similar("part(a)", "bell.a"),
    similar("part(a, x)", "x.bell.a"),
    similar("comp(g, a)", "g.bell.a"),
    similar("(a + g).bell", "a.bell + g.bell"),
    similar("bern + u", "-1*bern"),
    value("E[inv(bern)]", 3, "1/4"),
    similar("(a^.3)^.2", "a^.6"),
    dissimilar("a.(b + g)", "a.b + a.g"),
    similar("-3.bar(a)", "inv(3.bar(a))"),
    value("E[a'*(bell.a + a')^2]", 1, "?"),
    value("E[(a + b)^.2]", 2, "?"),
    similar("-2.bern", "inv(bern) + inv(bern')"),
    similar("(a - 2.g)", "a + inv(g) + inv(g')"),
];

/// Workspace with `a`, `b`, `g` drawn from a fixed seed and `x`, `y` declared.
pub fn workspace() -> Workspace {
    let mut ws = Workspace::with_indeterminates(ORDER, &["x", "y"]);
    let mut s = UmbraSampler::new(7);
    for name in ["a", "b", "g"] {
        ws.define_umbra(name, s.moments_invertible(ORDER)).unwrap();
    }
    ws
}

/// Command-line flags recreating [`workspace`].
pub fn workspace_flags() -> Vec<String> {
    let ws = workspace();
    let mut flags = vec!["--order".to_string(), ORDER.to_string()];
    for x in ["x", "y"] {
        flags.push("--indet".into());
        flags.push(x.into());
    }
    for name in ["a", "b", "g"] {
        let id = ws.lookup(name).unwrap();
        flags.push("--def".into());
        flags.push(format!("{name}={}", render_moments(&ws.atom(id).moments).join(",")));
    }
    flags
}

/// `E[expr^k]` in a fresh workspace.
pub fn eval(src: &str, k: usize) -> Result<Poly, umbral_core::Error> {
    let mut ws = workspace();
    let q = parse_query(src)?;
    let mut r = Resolver::new(&mut ws);
    let e = r.resolve(&q.expr)?;
    r.workspace().eval(&e, k)
}

/// Whether two expressions are similar up to the workspace order.
pub fn similar_pair(lhs: &str, rhs: &str) -> Result<bool, umbral_core::Error> {
    let mut ws = workspace();
    let mut r = Resolver::new(&mut ws);
    let a = r.resolve(&parse_query(lhs)?.expr)?;
    let b = r.resolve(&parse_query(rhs)?.expr)?;
    Ok(r.workspace().similarity(&a, &b)?.is_similar())
}

fn render(p: &Poly) -> String {
    render_moments(std::slice::from_ref(p)).remove(0)
}

/// Checks one corpus entry: parse, re-render, re-parse to the same tree, and
/// evaluate against the expectation. `?` values only need to evaluate.
pub fn check_entry(entry: &Entry) -> Result<(), String> {
    let q = parse_query(entry.src).map_err(|e| format!("{}: {e}", entry.src))?;
    let again = parse_query(&q.to_string()).map_err(|e| format!("{}: re-parse: {e}", entry.src))?;
    if again != q {
        return Err(format!("{}: rendering {} changes the tree", entry.src, q));
    }
    match &entry.expect {
        Expect::Value(k, want) => {
            let got = eval(entry.src, *k).map_err(|e| format!("{}: {e}", entry.src))?;
            if *want != "?" && render(&got) != *want {
                return Err(format!("{}: E[..^{k}] = {} (want {want})", entry.src, render(&got)));
            }
        }
        Expect::SimilarTo(other) | Expect::DissimilarTo(other) => {
            let want = matches!(entry.expect, Expect::SimilarTo(_));
            let got = similar_pair(entry.src, other).map_err(|e| format!("{}: {e}", entry.src))?;
            if got != want {
                return Err(format!("{} vs {other}: similar = {got}", entry.src));
            }
        }
    }
    Ok(())
}
