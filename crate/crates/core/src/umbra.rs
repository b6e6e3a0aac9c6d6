//! Umbrae, umbral expressions and the evaluation functional `E`.
//!
//! A [`Workspace`] owns every registered [`Atom`]. Evaluating `E[e^k]`
//! expands `e^k` into a polynomial in atom symbols *before* anything is
//! substituted, then replaces each power `alpha^p` by the p-th moment of
//! `alpha` and multiplies across distinct atoms. Two atoms are always
//! uncorrelated, so clones are simply fresh atoms with copied moments.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{format_rational, Poly};
use crate::series::{factorial, Series};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AtomId(pub u32);

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Extra structure an atom is known to carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AtomKind {
    Plain,
    /// Every lower-factorial moment is 1.
    BellScalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct Atom {
    pub id: AtomId,
    pub name: String,
    pub moments: Vec<Poly>,
    #[serde(skip)]
    pub egf: Series,
    #[serde(skip)]
    pub kind: AtomKind,
}

impl Atom {
    /// Highest moment index stored.
    pub fn order(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn moment(&self, k: usize) -> Result<&Poly> {
        self.moments.get(k).ok_or(Error::OrderExceeded {
            requested: k,
            available: self.order(),
        })
    }

    /// Checks `k! [t^k] egf = m_k` for every stored k.
    pub fn check_coherence(&self) -> Result<()> {
        if self.egf.order() != self.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: self.egf.order(),
            });
        }
        for (k, m) in self.moments.iter().enumerate() {
            let from_series = self.egf.coeff(k).scale(&factorial(k));
            if &from_series != m {
                return Err(Error::Incoherent {
                    name: self.name.clone(),
                    order: k,
                    moment: m.to_string(),
                    series: from_series.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Expression tree over atoms; the argument of `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UmbralExpr {
    Atom(AtomId),
    /// A scalar (possibly polynomial in indeterminates) with no umbral support.
    Const(Poly),
    Sum(Vec<UmbralExpr>),
    Product(Vec<UmbralExpr>),
    Scaled(Poly, Box<UmbralExpr>),
    Power(Box<UmbralExpr>, u32),
}

impl UmbralExpr {
    pub fn pow(self, p: u32) -> UmbralExpr {
        UmbralExpr::Power(Box::new(self), p)
    }

    pub fn scaled(self, c: Poly) -> UmbralExpr {
        UmbralExpr::Scaled(c, Box::new(self))
    }

    pub fn constant(c: impl Into<Poly>) -> UmbralExpr {
        UmbralExpr::Const(c.into())
    }

    /// Atoms occurring in the expression.
    pub fn support(&self) -> Vec<AtomId> {
        fn walk(e: &UmbralExpr, out: &mut Vec<AtomId>) {
            match e {
                UmbralExpr::Atom(id) => out.push(*id),
                UmbralExpr::Const(_) => {}
                UmbralExpr::Sum(xs) | UmbralExpr::Product(xs) => {
                    xs.iter().for_each(|x| walk(x, out))
                }
                UmbralExpr::Scaled(_, x) | UmbralExpr::Power(x, _) => walk(x, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }
}

impl From<AtomId> for UmbralExpr {
    fn from(id: AtomId) -> Self {
        UmbralExpr::Atom(id)
    }
}

impl Add for UmbralExpr {
    type Output = UmbralExpr;
    fn add(self, rhs: UmbralExpr) -> UmbralExpr {
        match self {
            UmbralExpr::Sum(mut xs) => {
                xs.push(rhs);
                UmbralExpr::Sum(xs)
            }
            lhs => UmbralExpr::Sum(vec![lhs, rhs]),
        }
    }
}

impl Mul for UmbralExpr {
    type Output = UmbralExpr;
    fn mul(self, rhs: UmbralExpr) -> UmbralExpr {
        match self {
            UmbralExpr::Product(mut xs) => {
                xs.push(rhs);
                UmbralExpr::Product(xs)
            }
            lhs => UmbralExpr::Product(vec![lhs, rhs]),
        }
    }
}

impl Add<AtomId> for AtomId {
    type Output = UmbralExpr;
    fn add(self, rhs: AtomId) -> UmbralExpr {
        UmbralExpr::Atom(self) + UmbralExpr::Atom(rhs)
    }
}

impl Mul<AtomId> for AtomId {
    type Output = UmbralExpr;
    fn mul(self, rhs: AtomId) -> UmbralExpr {
        UmbralExpr::Atom(self) * UmbralExpr::Atom(rhs)
    }
}

type AtomMonomial = Vec<(AtomId, u32)>;

/// Normal form of an umbral polynomial: atom power products with `Poly` coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct UmbralPoly(BTreeMap<AtomMonomial, Poly>);

impl UmbralPoly {
    fn constant(c: Poly) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Vec::new(), c);
        }
        UmbralPoly(m)
    }

    fn atom(id: AtomId) -> Self {
        let mut m = BTreeMap::new();
        m.insert(vec![(id, 1)], Poly::one());
        UmbralPoly(m)
    }

    fn add_term(&mut self, mono: AtomMonomial, c: Poly) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn add(&self, other: &UmbralPoly) -> UmbralPoly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn scale(&self, c: &Poly) -> UmbralPoly {
        let mut out = UmbralPoly::default();
        for (m, v) in &self.0 {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    fn mul(&self, other: &UmbralPoly) -> UmbralPoly {
        let mut out = UmbralPoly::default();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                out.add_term(mul_monomials(ma, mb), ca * cb);
            }
        }
        out
    }

    fn pow(&self, k: u32) -> UmbralPoly {
        let mut acc = UmbralPoly::constant(Poly::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

fn mul_monomials(a: &AtomMonomial, b: &AtomMonomial) -> AtomMonomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Outcome of comparing two moment sequences up to the order both can reach.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Similarity {
    /// Highest order compared.
    pub up_to: usize,
    /// First order at which the moments differ.
    pub differs_at: Option<usize>,
}

impl Similarity {
    pub fn is_similar(&self) -> bool {
        self.differs_at.is_none()
    }
}

/// Registry of atoms, declared indeterminates and the truncation order.
#[derive(Clone, Debug)]
pub struct Workspace {
    order: usize,
    indeterminates: Vec<String>,
    atoms: Vec<Atom>,
    names: HashMap<String, AtomId>,
    user_defined: Vec<AtomId>,
}

pub const EPSILON_NAME: &str = "eps";
/// Id of the augmentation in every workspace.
pub const EPSILON: AtomId = AtomId(0);
/// Id of the unity umbra in every workspace.
pub const UNITY: AtomId = AtomId(1);
pub const UNITY_NAME: &str = "u";

impl Workspace {
    pub fn new(order: usize) -> Workspace {
        let mut ws = Workspace {
            order,
            indeterminates: Vec::new(),
            atoms: Vec::new(),
            names: HashMap::new(),
            user_defined: Vec::new(),
        };
        let eps: Vec<Poly> = (0..=order)
            .map(|k| if k == 0 { Poly::one() } else { Poly::zero() })
            .collect();
        let unity = vec![Poly::one(); order + 1];
        let e = ws
            .register(EPSILON_NAME, eps, Series::one(order), AtomKind::Plain)
            .expect("augmentation is coherent");
        let u = ws
            .register(UNITY_NAME, unity, Series::exp_t(order), AtomKind::Plain)
            .expect("unity is coherent");
        ws.names.insert(EPSILON_NAME.into(), e);
        ws.names.insert(UNITY_NAME.into(), u);
        ws
    }

    pub fn with_indeterminates(order: usize, names: &[&str]) -> Workspace {
        let mut ws = Workspace::new(order);
        for n in names {
            ws.declare_indeterminate(n).expect("fresh indeterminate");
        }
        ws
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn indeterminates(&self) -> &[String] {
        &self.indeterminates
    }

    pub fn is_indeterminate(&self, name: &str) -> bool {
        self.indeterminates.iter().any(|v| v == name)
    }

    pub fn declare_indeterminate(&mut self, name: &str) -> Result<()> {
        if self.is_indeterminate(name) || self.names.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        self.indeterminates.push(name.to_string());
        Ok(())
    }

    /// The augmentation `eps`, with moments `delta_{0,n}`.
    pub fn epsilon(&self) -> AtomId {
        EPSILON
    }

    /// The unity umbra `u`, with all moments 1.
    pub fn unity(&self) -> AtomId {
        UNITY
    }

    pub fn atom(&self, id: AtomId) -> &Atom {
        &self.atoms[id.0 as usize]
    }

    pub fn try_atom(&self, id: AtomId) -> Result<&Atom> {
        self.atoms
            .get(id.0 as usize)
            .ok_or_else(|| Error::UnknownAtom(id.to_string()))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn lookup(&self, name: &str) -> Result<AtomId> {
        self.names
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    pub fn check_indeterminates(&self, p: &Poly) -> Result<()> {
        for v in p.variables() {
            if !self.is_indeterminate(&v) {
                return Err(Error::UndeclaredIndeterminate(v));
            }
        }
        Ok(())
    }

    /// Registers a named umbra from its full moment sequence `m_0..=m_N`.
    pub fn define_umbra(&mut self, name: &str, moments: Vec<Poly>) -> Result<AtomId> {
        if self.names.contains_key(name) || self.is_indeterminate(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        if moments.len() != self.order + 1 {
            return Err(Error::BadMomentCount {
                expected: self.order + 1,
                got: moments.len(),
            });
        }
        let egf = Series::from_moments(&moments);
        let id = self.register(name, moments, egf, AtomKind::Plain)?;
        self.names.insert(name.to_string(), id);
        self.user_defined.push(id);
        Ok(id)
    }

    /// Registers a derived atom after checking `m_0 = 1` and moment/series coherence.
    pub fn register(
        &mut self,
        name: &str,
        moments: Vec<Poly>,
        egf: Series,
        kind: AtomKind,
    ) -> Result<AtomId> {
        let first = moments
            .first()
            .ok_or(Error::BadMomentCount { expected: 1, got: 0 })?;
        if !first.is_one() {
            return Err(Error::BadZerothMoment(first.to_string()));
        }
        if moments.len() > self.order + 1 {
            return Err(Error::BadMomentCount {
                expected: self.order + 1,
                got: moments.len(),
            });
        }
        for m in &moments {
            self.check_indeterminates(m)?;
        }
        let id = AtomId(self.atoms.len() as u32);
        let atom = Atom {
            id,
            name: name.to_string(),
            moments,
            egf,
            kind,
        };
        atom.check_coherence()?;
        self.atoms.push(atom);
        Ok(id)
    }

    /// A fresh atom similar to `id` and uncorrelated with it.
    pub fn clone_atom(&mut self, id: AtomId) -> AtomId {
        let src = self.atom(id).clone();
        let new_id = AtomId(self.atoms.len() as u32);
        self.atoms.push(Atom {
            id: new_id,
            name: format!("{}'", src.name),
            ..src
        });
        new_id
    }

    fn expand(&self, e: &UmbralExpr) -> Result<UmbralPoly> {
        Ok(match e {
            UmbralExpr::Atom(id) => {
                self.try_atom(*id)?;
                UmbralPoly::atom(*id)
            }
            UmbralExpr::Const(c) => UmbralPoly::constant(c.clone()),
            UmbralExpr::Sum(xs) => {
                let mut acc = UmbralPoly::default();
                for x in xs {
                    acc = acc.add(&self.expand(x)?);
                }
                acc
            }
            UmbralExpr::Product(xs) => {
                let mut acc = UmbralPoly::constant(Poly::one());
                for x in xs {
                    acc = acc.mul(&self.expand(x)?);
                }
                acc
            }
            UmbralExpr::Scaled(c, x) => self.expand(x)?.scale(c),
            UmbralExpr::Power(x, p) => self.expand(x)?.pow(*p),
        })
    }

    fn apply_functional(&self, p: &UmbralPoly) -> Result<Poly> {
        let mut acc = Poly::zero();
        for (mono, c) in &p.0 {
            let mut term = c.clone();
            for (id, exp) in mono {
                let m = self.atom(*id).moment(*exp as usize)?;
                if m.is_zero() {
                    term = Poly::zero();
                    break;
                }
                term = &term * m;
            }
            acc += &term;
        }
        Ok(acc)
    }

    /// `E[e^k]`.
    pub fn eval(&self, e: &UmbralExpr, k: usize) -> Result<Poly> {
        if k > self.order {
            return Err(Error::OrderExceeded {
                requested: k,
                available: self.order,
            });
        }
        let p = self.expand(e)?.pow(k as u32);
        self.apply_functional(&p)
    }

    /// `E[e^0], ..., E[e^order]`, stopping early only on error.
    pub fn moments_of(&self, e: &UmbralExpr, order: usize) -> Result<Vec<Poly>> {
        if order > self.order {
            return Err(Error::OrderExceeded {
                requested: order,
                available: self.order,
            });
        }
        let base = self.expand(e)?;
        let mut power = UmbralPoly::constant(Poly::one());
        let mut out = Vec::with_capacity(order + 1);
        for k in 0..=order {
            out.push(self.apply_functional(&power)?);
            if k < order {
                power = power.mul(&base);
            }
        }
        Ok(out)
    }

    /// The generating function `sum_k E[e^k] t^k / k!` at the workspace order.
    pub fn gf_of(&self, e: &UmbralExpr) -> Result<Series> {
        self.gf_of_order(e, self.order)
    }

    pub fn gf_of_order(&self, e: &UmbralExpr, order: usize) -> Result<Series> {
        Ok(Series::from_moments(&self.moments_of(e, order)?))
    }

    /// Compares moments order by order until one side runs out of stored moments.
    pub fn similarity(&self, a: &UmbralExpr, b: &UmbralExpr) -> Result<Similarity> {
        let (pa, pb) = (self.expand(a)?, self.expand(b)?);
        let mut power_a = UmbralPoly::constant(Poly::one());
        let mut power_b = power_a.clone();
        let mut up_to = 0;
        for k in 0..=self.order {
            let (ea, eb) = match (self.apply_functional(&power_a), self.apply_functional(&power_b)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(Error::OrderExceeded { .. }), _) | (_, Err(Error::OrderExceeded { .. })) => {
                    break
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            if ea != eb {
                return Ok(Similarity {
                    up_to: k,
                    differs_at: Some(k),
                });
            }
            up_to = k;
            if k < self.order {
                power_a = power_a.mul(&pa);
                power_b = power_b.mul(&pb);
            }
        }
        Ok(Similarity {
            up_to,
            differs_at: None,
        })
    }

    /// Similarity up to the truncation order (never absolute similarity).
    pub fn similar_to(&self, a: impl Into<UmbralExpr>, b: impl Into<UmbralExpr>) -> bool {
        self.similarity(&a.into(), &b.into())
            .map(|s| s.is_similar())
            .unwrap_or(false)
    }

    pub fn to_file(&self) -> WorkspaceFile {
        WorkspaceFile {
            order: self.order,
            indeterminates: self.indeterminates.clone(),
            umbrae: self
                .user_defined
                .iter()
                .map(|id| {
                    let a = self.atom(*id);
                    (a.name.clone(), a.moments.clone())
                })
                .collect(),
        }
    }

    /// Builds a workspace from its file form; `order` overrides the file's order
    /// and moment lists longer than needed are truncated.
    pub fn from_file(file: &WorkspaceFile, order: Option<usize>) -> Result<Workspace> {
        let order = order.unwrap_or(file.order);
        let mut ws = Workspace::new(order);
        for v in &file.indeterminates {
            ws.declare_indeterminate(v)?;
        }
        for (name, moments) in &file.umbrae {
            if moments.len() < order + 1 {
                return Err(Error::BadMomentCount {
                    expected: order + 1,
                    got: moments.len(),
                });
            }
            ws.define_umbra(name, moments[..=order].to_vec())?;
        }
        Ok(ws)
    }
}

/// JSON form of a workspace: `{order, indeterminates, umbrae: {name: [moments]}}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceFile {
    pub order: usize,
    #[serde(default)]
    pub indeterminates: Vec<String>,
    #[serde(default)]
    pub umbrae: BTreeMap<String, Vec<Poly>>,
}

/// Renders a moment list as `p/q` strings (for reports and witnesses).
pub fn render_moments(moments: &[Poly]) -> Vec<String> {
    moments
        .iter()
        .map(|m| match m.as_constant() {
            Some(c) => format_rational(&c),
            None => m.to_string(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;
    use crate::series::binomial;

    fn ws_with(moments: &[i64]) -> (Workspace, AtomId) {
        let mut ws = Workspace::new(moments.len() - 1);
        let id = ws
            .define_umbra("a", moments.iter().map(|&m| Poly::from_int(m)).collect())
            .unwrap();
        (ws, id)
    }

    #[test]
    fn axioms_for_builtins() {
        let ws = Workspace::new(6);
        for n in 0..=6 {
            assert_eq!(ws.eval(&ws.unity().into(), n).unwrap(), Poly::one());
            let expected = if n == 0 { Poly::one() } else { Poly::zero() };
            assert_eq!(ws.eval(&ws.epsilon().into(), n).unwrap(), expected);
        }
        assert_eq!(ws.eval(&UmbralExpr::constant(1), 0).unwrap(), Poly::one());
        assert!(!ws.similar_to(ws.unity(), ws.epsilon()));
        assert_eq!(ws.gf_of(&ws.epsilon().into()).unwrap(), Series::one(6));
        assert_eq!(ws.gf_of(&ws.unity().into()).unwrap(), Series::exp_t(6));
    }

    #[test]
    fn define_umbra_checks() {
        let mut ws = Workspace::new(3);
        let ones = ws.define_umbra("one", vec![Poly::one(); 4]).unwrap();
        assert!(ws.similar_to(ones, ws.unity()));
        let delta = ws
            .define_umbra("z", vec![Poly::one(), Poly::zero(), Poly::zero(), Poly::zero()])
            .unwrap();
        assert!(ws.similar_to(delta, ws.epsilon()));
        assert_eq!(
            ws.define_umbra("b", vec![Poly::from_int(2); 4]),
            Err(Error::BadZerothMoment("2".into()))
        );
        assert!(matches!(
            ws.define_umbra("c", vec![Poly::one(); 3]),
            Err(Error::BadMomentCount { .. })
        ));
        assert!(matches!(
            ws.define_umbra("one", vec![Poly::one(); 4]),
            Err(Error::DuplicateName(_))
        ));
        let x = Poly::var("x");
        assert_eq!(
            ws.define_umbra("d", (0..4).map(|k| x.pow(k)).collect()),
            Err(Error::UndeclaredIndeterminate("x".into()))
        );
        ws.declare_indeterminate("x").unwrap();
        let d = ws.define_umbra("d", (0..4).map(|k| x.pow(k)).collect()).unwrap();
        assert_eq!(ws.eval(&d.into(), 3).unwrap(), x.pow(3));
    }

    #[test]
    fn clones_are_uncorrelated() {
        let (mut ws, a) = ws_with(&[1, 2, 5, 7, 11]);
        let b = ws.clone_atom(a);
        for k in 0..=4 {
            assert_eq!(ws.eval(&b.into(), k).unwrap(), ws.eval(&a.into(), k).unwrap());
        }
        assert_eq!(ws.eval(&(a * b), 1).unwrap(), Poly::from_int(4));
        assert_eq!(ws.eval(&a.into(), 2).unwrap(), Poly::from_int(5));
        // E[(a + a')^n] = sum C(n,i) a_i a_{n-i}
        let m = [1, 2, 5, 7, 11];
        for n in 0..=4 {
            let expected = (0..=n).fold(Poly::zero(), |acc, i| {
                acc + Poly::constant(binomial(n, i) * int(m[i] * m[n - i]))
            });
            assert_eq!(ws.eval(&(a + b), n).unwrap(), expected);
        }
        let u2 = ws.clone_atom(ws.unity());
        assert!(ws.similar_to(u2, ws.unity()));
    }

    #[test]
    fn uncorrelation_and_orders() {
        let mut ws = Workspace::new(4);
        let a = ws
            .define_umbra("a", [1, 3, 4, 6, 8].iter().map(|&m| Poly::from_int(m)).collect())
            .unwrap();
        let g = ws
            .define_umbra("g", [1, 2, 9, 10, 12].iter().map(|&m| Poly::from_int(m)).collect())
            .unwrap();
        let e = UmbralExpr::from(a).pow(2) * UmbralExpr::from(g).pow(3);
        assert_eq!(ws.eval(&e, 1).unwrap(), Poly::from_int(4 * 10));
        assert!(matches!(ws.eval(&e, 2), Err(Error::OrderExceeded { .. })));
        assert!(matches!(ws.eval(&a.into(), 5), Err(Error::OrderExceeded { .. })));
        assert!(ws.similar_to(a + g, g + a));
        // disjoint supports multiply generating functions
        let product = ws
            .gf_of(&a.into())
            .unwrap()
            .mul(&ws.gf_of(&g.into()).unwrap())
            .unwrap();
        assert_eq!(ws.gf_of(&(a + g)).unwrap(), product);
    }

    #[test]
    fn scalar_multiple_rescales_moments() {
        let (ws, a) = ws_with(&[1, 2, 5, 7]);
        let e = UmbralExpr::from(a).scaled(Poly::from_int(3));
        assert_eq!(ws.eval(&e, 2).unwrap(), Poly::from_int(45));
        assert_eq!(ws.eval(&e, 3).unwrap(), Poly::from_int(27 * 7));
    }

    #[test]
    fn workspace_file_round_trip() {
        let mut ws = Workspace::with_indeterminates(2, &["x"]);
        ws.define_umbra("a", vec![Poly::one(), Poly::var("x"), Poly::from_int(3)])
            .unwrap();
        let file = ws.to_file();
        let json = serde_json::to_string(&file).unwrap();
        assert_eq!(
            json,
            r#"{"order":2,"indeterminates":["x"],"umbrae":{"a":["1",{"x":"1"},"3"]}}"#
        );
        let back: WorkspaceFile = serde_json::from_str(&json).unwrap();
        let ws2 = Workspace::from_file(&back, None).unwrap();
        assert_eq!(ws2.to_file(), file);
        let lower = Workspace::from_file(&back, Some(1)).unwrap();
        assert_eq!(lower.atom(lower.lookup("a").unwrap()).order(), 1);
        assert!(Workspace::from_file(&back, Some(3)).is_err());
    }
}
