//! Exact combinatorial kernels: Stirling and Bell numbers, partial and
//! complete Bell polynomials, exponential polynomials, Bernoulli numbers,
//! and a brute-force set-partition enumerator used as an oracle.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Poly, Rational};
use crate::series::{binomial, factorial, Series};

/// Largest set size the partition enumerator accepts.
pub const ENUMERATION_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StirlingKind {
    FirstSigned,
    Second,
}

struct Triangle {
    rows: Vec<Vec<BigInt>>,
}

impl Triangle {
    fn extend_to(&mut self, n: usize, kind: StirlingKind) {
        if self.rows.is_empty() {
            self.rows.push(vec![BigInt::one()]);
        }
        while self.rows.len() <= n {
            let i = self.rows.len();
            let prev = &self.rows[i - 1];
            let mut row = vec![BigInt::zero(); i + 1];
            for k in 1..=i {
                let carry = prev.get(k - 1).cloned().unwrap_or_default();
                let stay = prev.get(k).cloned().unwrap_or_default();
                row[k] = match kind {
                    StirlingKind::Second => carry + stay * k,
                    StirlingKind::FirstSigned => carry - stay * (i - 1),
                };
            }
            self.rows.push(row);
        }
    }
}

fn triangle(kind: StirlingKind) -> &'static RwLock<Triangle> {
    static FIRST: OnceLock<RwLock<Triangle>> = OnceLock::new();
    static SECOND: OnceLock<RwLock<Triangle>> = OnceLock::new();
    let cell = match kind {
        StirlingKind::FirstSigned => &FIRST,
        StirlingKind::Second => &SECOND,
    };
    cell.get_or_init(|| RwLock::new(Triangle { rows: Vec::new() }))
}

/// Stirling number `s(n,k)` (signed, first kind) or `S(n,k)` (second kind).
pub fn stirling(kind: StirlingKind, n: usize, k: usize) -> Result<Rational> {
    if k > n {
        return Err(Error::Index(format!("stirling requires k <= n, got n={n}, k={k}")));
    }
    let lock = triangle(kind);
    {
        let t = lock.read().expect("stirling cache poisoned");
        if let Some(row) = t.rows.get(n) {
            return Ok(Rational::from_integer(row[k].clone()));
        }
    }
    let mut t = lock.write().expect("stirling cache poisoned");
    t.extend_to(n, kind);
    Ok(Rational::from_integer(t.rows[n][k].clone()))
}

/// Bell number via `B_{n+1} = sum_k C(n,k) B_k`.
pub fn bell_number(n: usize) -> Rational {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    let lock = CACHE.get_or_init(|| RwLock::new(vec![Rational::one()]));
    if let Some(b) = lock.read().expect("bell cache poisoned").get(n) {
        return b.clone();
    }
    let mut bells = lock.write().expect("bell cache poisoned");
    while bells.len() <= n {
        let m = bells.len() - 1;
        let next = (0..=m).fold(Rational::zero(), |acc, k| acc + binomial(m, k) * &bells[k]);
        bells.push(next);
    }
    bells[n].clone()
}

/// All partial Bell polynomials `B_{n,k}(a_1, ...)` for `0 <= k <= n <= max_n`,
/// computed from the coefficients of `(f - 1)^k / k!` with `f = 1 + sum a_j t^j / j!`.
#[derive(Clone, Debug)]
pub struct PartialBellTable {
    rows: Vec<Vec<Poly>>,
}

impl PartialBellTable {
    /// `a[0]` is `a_1`. Missing entries beyond `a.len()` are taken as zero.
    pub fn new(a: &[Poly], max_n: usize) -> PartialBellTable {
        let mut moments = Vec::with_capacity(max_n + 1);
        moments.push(Poly::zero());
        for j in 1..=max_n {
            moments.push(a.get(j - 1).cloned().unwrap_or_default());
        }
        let h = Series::from_moments(&moments);
        let mut rows = vec![vec![Poly::zero(); max_n + 1]; max_n + 1];
        let mut power = Series::one(max_n);
        for k in 0..=max_n {
            let scale = factorial(k).recip();
            for n in k..=max_n {
                rows[n][k] = power.coeff(n).scale(&(factorial(n) * &scale));
            }
            power = power.mul(&h).expect("orders agree");
        }
        PartialBellTable { rows }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// `B_{n,k}`; zero when `k > n`.
    pub fn get(&self, n: usize, k: usize) -> &Poly {
        static ZERO: OnceLock<Poly> = OnceLock::new();
        if k > n {
            return ZERO.get_or_init(Poly::zero);
        }
        &self.rows[n][k]
    }

    /// `Y_n = sum_{k=1..n} B_{n,k}`, with `Y_0 = 1`.
    pub fn complete(&self, n: usize) -> Poly {
        if n == 0 {
            return Poly::one();
        }
        (1..=n).fold(Poly::zero(), |acc, k| acc + self.rows[n][k].clone())
    }

    /// `sum_k w_k B_{n,k}` for weights `w_0..=w_n`.
    pub fn weighted(&self, n: usize, weights: &[Poly]) -> Poly {
        let mut acc = Poly::zero();
        for (k, w) in weights.iter().enumerate().take(n + 1) {
            let b = &self.rows[n][k];
            if !b.is_zero() && !w.is_zero() {
                acc += &(w * b);
            }
        }
        acc
    }
}

/// `B_{n,k}(a_1, ..., a_{n-k+1})`.
pub fn partial_bell(n: usize, k: usize, a: &[Poly]) -> Result<Poly> {
    if k < 1 || k > n {
        return Err(Error::Index(format!("partial_bell requires 1 <= k <= n, got n={n}, k={k}")));
    }
    if a.len() < n - k + 1 {
        return Err(Error::Index(format!(
            "partial_bell({n},{k}) needs {} arguments, got {}",
            n - k + 1,
            a.len()
        )));
    }
    let used = &a[..n - k + 1];
    Ok(PartialBellTable::new(used, n).get(n, k).clone())
}

/// Complete Bell (partition) polynomial `Y_n(a_1, ..., a_n)`.
pub fn complete_bell(n: usize, a: &[Poly]) -> Result<Poly> {
    if a.len() < n {
        return Err(Error::Index(format!(
            "complete_bell({n}) needs {n} arguments, got {}",
            a.len()
        )));
    }
    Ok(PartialBellTable::new(&a[..n], n).complete(n))
}

/// `sum_k S(n,k) p^k`; with `p = x` this is the exponential polynomial.
pub fn exponential_poly_at(n: usize, p: &Poly) -> Poly {
    let mut acc = Poly::zero();
    let mut power = Poly::one();
    for k in 0..=n {
        let s = stirling(StirlingKind::Second, n, k).expect("k <= n");
        acc += &power.scale(&s);
        power = &power * p;
    }
    acc
}

/// Exponential polynomial `Phi_n(x)` in the indeterminate `x`.
pub fn exponential_poly(n: usize) -> Poly {
    exponential_poly_at(n, &Poly::var("x"))
}

/// Bernoulli number `B_n` (with `B_1 = -1/2`), read off `t / (e^t - 1)`.
pub fn bernoulli_number(n: usize) -> Rational {
    bernoulli_series(n)
        .egf_moment(n)
        .expect("order n")
        .as_constant()
        .expect("rational")
}

/// The series `t / (e^t - 1)` to order `order`.
pub fn bernoulli_series(order: usize) -> Series {
    // (e^t - 1)/t = sum t^k/(k+1)!
    let quotient = Series::exp_t(order + 1).shift_down();
    quotient.pow_int(-1).expect("unital")
}

/// Block-size multiset of a set partition, sizes in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PartitionWeight {
    pub block_sizes: Vec<usize>,
}

impl PartitionWeight {
    pub fn blocks(&self) -> usize {
        self.block_sizes.len()
    }

    /// `prod a_{|block|}` with `a[0] = a_1`.
    pub fn weight(&self, a: &[Poly]) -> Poly {
        self.block_sizes
            .iter()
            .fold(Poly::one(), |acc, &s| &acc * &a[s - 1])
    }
}

/// A block structure together with the number of set partitions having it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionClass {
    pub weight: PartitionWeight,
    pub count: u64,
}

/// Enumerates every set partition of an `n`-set and groups them by block sizes.
pub fn enumerate_partitions(n: usize) -> Result<Vec<PartitionClass>> {
    if n > ENUMERATION_CAP {
        return Err(Error::TooLarge(n));
    }
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    if n == 0 {
        counts.insert(Vec::new(), 1);
    } else {
        let mut sizes = Vec::with_capacity(n);
        place(1, n, &mut sizes, &mut counts);
    }
    let mut classes: Vec<PartitionClass> = counts
        .into_iter()
        .map(|(block_sizes, count)| PartitionClass {
            weight: PartitionWeight { block_sizes },
            count,
        })
        .collect();
    classes.sort_by(|a, b| b.weight.cmp(&a.weight));
    Ok(classes)
}

// Element `next` (1-based) joins an existing block or opens a new one.
fn place(next: usize, n: usize, sizes: &mut Vec<usize>, counts: &mut HashMap<Vec<usize>, u64>) {
    if next > n {
        let mut key = sizes.clone();
        key.sort_unstable_by(|a, b| b.cmp(a));
        *counts.entry(key).or_insert(0) += 1;
        return;
    }
    if next == 1 {
        sizes.push(1);
        place(2, n, sizes, counts);
        sizes.pop();
        return;
    }
    for i in 0..sizes.len() {
        sizes[i] += 1;
        place(next + 1, n, sizes, counts);
        sizes[i] -= 1;
    }
    sizes.push(1);
    place(next + 1, n, sizes, counts);
    sizes.pop();
}

/// `sum` over set partitions with exactly `k` blocks of `prod a_{|block|}`.
pub fn partial_bell_by_enumeration(n: usize, k: usize, a: &[Poly]) -> Result<Poly> {
    let classes = enumerate_partitions(n)?;
    let mut acc = Poly::zero();
    for class in classes.iter().filter(|c| c.weight.blocks() == k) {
        acc += &class
            .weight
            .weight(a)
            .scale(&Rational::from_integer(class.count.into()));
    }
    Ok(acc)
}
