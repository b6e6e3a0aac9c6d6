//! Seeded Monte Carlo checks of the probabilistic readings of Bell,
//! partition and composition umbrae.
//!
//! A Poisson variable with parameter `x` has the moments of `x.bell`; a
//! compound Poisson sum with jump law `J` those of `x.bell.J`; a Poisson
//! variable with random parameter `X` those of `X.bell`; and a compound sum
//! with random parameter those of the composition umbra. [`compare`] draws
//! samples and reports z-scores of empirical moments against these exact
//! predictions.
//!
//! The generator is xoshiro256++. Samples are drawn in chunks of
//! [`CHUNK`]; chunk `c` uses the seeded generator advanced by `c` jumps of
//! 2^128 steps, so results do not depend on the number of threads.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use umbral_core::ops::{bell_umbra, composition_umbra, dot, partition_umbra, DotLeft};
use umbral_core::poly::{format_rational, parse_rational, rational_to_f64};
use umbral_core::{Poly, Rational, Workspace};

pub const CHUNK: usize = 65_536;
pub const MAX_ORDER: usize = 6;
pub const DEFAULT_TOLERANCE: f64 = 8.0;
/// Largest Poisson parameter for which sequential inversion is used.
pub const MAX_LAMBDA: i64 = 16;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("max order {0} exceeds {MAX_ORDER}")]
    MaxOrder(usize),
    #[error(transparent)]
    Core(#[from] umbral_core::Error),
}

impl LabError {
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::InvalidDistribution(_) => "InvalidDistribution",
            LabError::InvalidModel(_) => "InvalidModel",
            LabError::MaxOrder(_) => "DomainError",
            LabError::Core(e) => e.kind(),
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

/// A finite discrete law with exact rational values and probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteDist {
    support: Vec<(Rational, Rational)>,
}

impl DiscreteDist {
    pub fn new(support: Vec<(Rational, Rational)>) -> Result<DiscreteDist> {
        if support.is_empty() {
            return Err(LabError::InvalidDistribution("empty support".into()));
        }
        if let Some((v, p)) = support.iter().find(|(_, p)| !p.is_positive()) {
            return Err(LabError::InvalidDistribution(format!(
                "probability {} at {} is not positive",
                format_rational(p),
                format_rational(v)
            )));
        }
        let total: Rational = support.iter().map(|(_, p)| p.clone()).sum();
        if !total.is_one() {
            return Err(LabError::InvalidDistribution(format!(
                "probabilities sum to {}",
                format_rational(&total)
            )));
        }
        Ok(DiscreteDist { support })
    }

    pub fn point(value: Rational) -> DiscreteDist {
        DiscreteDist {
            support: vec![(value, Rational::one())],
        }
    }

    pub fn support(&self) -> &[(Rational, Rational)] {
        &self.support
    }

    /// `E[X^k]` for `k = 0..=order`.
    pub fn moments(&self, order: usize) -> Vec<Rational> {
        (0..=order)
            .map(|k| {
                self.support
                    .iter()
                    .map(|(v, p)| num_traits::pow(v.clone(), k) * p)
                    .sum()
            })
            .collect()
    }

    fn require_nonnegative(&self, what: &str) -> Result<()> {
        if let Some((v, _)) = self.support.iter().find(|(v, _)| v.is_negative()) {
            return Err(LabError::InvalidDistribution(format!(
                "{what} value {} is negative",
                format_rational(v)
            )));
        }
        Ok(())
    }

    fn table(&self) -> Table {
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(self.support.len());
        let mut values = Vec::with_capacity(self.support.len());
        for (v, p) in &self.support {
            acc += rational_to_f64(p);
            cumulative.push(acc);
            values.push(rational_to_f64(v));
        }
        Table { cumulative, values }
    }
}

impl fmt::Display for DiscreteDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .support
            .iter()
            .map(|(v, p)| format!("{}:{}", format_rational(v), format_rational(p)))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses `v:p,v:p,...` with rational values and probabilities.
impl FromStr for DiscreteDist {
    type Err = LabError;

    fn from_str(s: &str) -> Result<DiscreteDist> {
        let mut support = Vec::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (v, p) = item
                .split_once(':')
                .ok_or_else(|| LabError::InvalidDistribution(format!("expected value:prob, got {item:?}")))?;
            let parse = |x: &str| {
                parse_rational(x.trim())
                    .map_err(|_| LabError::InvalidDistribution(format!("bad rational {x:?}")))
            };
            support.push((parse(v)?, parse(p)?));
        }
        DiscreteDist::new(support)
    }
}

struct Table {
    cumulative: Vec<f64>,
    values: Vec<f64>,
}

impl Table {
    fn draw(&self, rng: &mut Xoshiro256PlusPlus) -> f64 {
        let u: f64 = rng.gen();
        let i = self
            .cumulative
            .iter()
            .position(|c| u < *c)
            .unwrap_or(self.values.len() - 1);
        self.values[i]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Poisson { lambda: Rational },
    Compound { lambda: Rational, jumps: DiscreteDist },
    Randomized { param: DiscreteDist },
    RandomizedCompound { param: DiscreteDist, jumps: DiscreteDist },
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Poisson { lambda } => write!(f, "poisson({})", format_rational(lambda)),
            Model::Compound { lambda, jumps } => {
                write!(f, "compound({}, {{{jumps}}})", format_rational(lambda))
            }
            Model::Randomized { param } => write!(f, "randomized({{{param}}})"),
            Model::RandomizedCompound { param, jumps } => {
                write!(f, "randomized_compound({{{param}}}, {{{jumps}}})")
            }
        }
    }
}

fn check_lambda(lambda: &Rational, what: &str) -> Result<()> {
    if lambda.is_negative() || *lambda > Rational::from_integer(MAX_LAMBDA.into()) {
        return Err(LabError::InvalidModel(format!(
            "{what} {} outside [0, {MAX_LAMBDA}]",
            format_rational(lambda)
        )));
    }
    Ok(())
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Poisson { lambda } | Model::Compound { lambda, .. } => {
                if lambda.is_zero() {
                    return Err(LabError::InvalidModel("lambda must be positive".into()));
                }
                check_lambda(lambda, "lambda")
            }
            Model::Randomized { param } | Model::RandomizedCompound { param, .. } => {
                param.require_nonnegative("parameter")?;
                param
                    .support()
                    .iter()
                    .try_for_each(|(v, _)| check_lambda(v, "parameter"))
            }
        }
    }

    /// Exact moments `0..=order` from the umbral engine.
    pub fn predictions(&self, order: usize) -> Result<Vec<Rational>> {
        self.validate()?;
        let mut ws = Workspace::new(order);
        let atom = match self {
            Model::Poisson { lambda } => {
                bell_umbra(&mut ws, Some(&DotLeft::Scalar(Poly::constant(lambda.clone()))))?
            }
            Model::Compound { lambda, jumps } => {
                let j = define(&mut ws, "jump", jumps, order)?;
                partition_umbra(&mut ws, j, Some(&DotLeft::Scalar(Poly::constant(lambda.clone()))))?
            }
            Model::Randomized { param } => {
                let x = define(&mut ws, "param", param, order)?;
                let b = bell_umbra(&mut ws, None)?;
                dot(&mut ws, &DotLeft::Umbra(x), b)?
            }
            Model::RandomizedCompound { param, jumps } => {
                let x = define(&mut ws, "param", param, order)?;
                let j = define(&mut ws, "jump", jumps, order)?;
                composition_umbra(&mut ws, x, j)?
            }
        };
        Ok(ws
            .atom(atom)
            .moments
            .iter()
            .map(|m| m.as_constant().expect("numeric model"))
            .collect())
    }

    fn sampler(&self) -> Sampler {
        match self {
            Model::Poisson { lambda } => Sampler::Poisson(rational_to_f64(lambda)),
            Model::Compound { lambda, jumps } => Sampler::Compound(rational_to_f64(lambda), jumps.table()),
            Model::Randomized { param } => Sampler::Randomized(param.table()),
            Model::RandomizedCompound { param, jumps } => {
                Sampler::RandomizedCompound(param.table(), jumps.table())
            }
        }
    }
}

fn define(ws: &mut Workspace, name: &str, d: &DiscreteDist, order: usize) -> Result<umbral_core::AtomId> {
    let m = d.moments(order).into_iter().map(Poly::constant).collect();
    Ok(ws.define_umbra(name, m)?)
}

enum Sampler {
    Poisson(f64),
    Compound(f64, Table),
    Randomized(Table),
    RandomizedCompound(Table, Table),
}

/// Sequential inversion of the Poisson distribution function.
fn poisson(rng: &mut Xoshiro256PlusPlus, lambda: f64) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    let u: f64 = rng.gen();
    let mut k = 0u64;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while u > cdf && p > 0.0 {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
    }
    k
}

impl Sampler {
    fn draw(&self, rng: &mut Xoshiro256PlusPlus) -> f64 {
        match self {
            Sampler::Poisson(lambda) => poisson(rng, *lambda) as f64,
            Sampler::Compound(lambda, jumps) => {
                let n = poisson(rng, *lambda);
                (0..n).map(|_| jumps.draw(rng)).sum()
            }
            Sampler::Randomized(param) => {
                let x = param.draw(rng);
                poisson(rng, x) as f64
            }
            Sampler::RandomizedCompound(param, jumps) => {
                let x = param.draw(rng);
                let n = poisson(rng, x);
                (0..n).map(|_| jumps.draw(rng)).sum()
            }
        }
    }
}

/// Generators for each chunk: the seeded generator advanced by `c` jumps.
fn chunk_rngs(seed: u64, chunks: usize) -> Vec<Xoshiro256PlusPlus> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut out = Vec::with_capacity(chunks);
    for _ in 0..chunks {
        out.push(rng.clone());
        rng.jump();
    }
    out
}

fn chunk_sizes(n: usize) -> Vec<usize> {
    (0..n.div_ceil(CHUNK))
        .map(|c| CHUNK.min(n - c * CHUNK))
        .collect()
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(LabError::InvalidModel("sample size must be at least 1".into()));
    }
    Ok(())
}

/// `n` i.i.d. draws from `model`.
pub fn sample(model: &Model, n: usize, seed: u64) -> Result<Vec<f64>> {
    model.validate()?;
    check_n(n)?;
    let sampler = model.sampler();
    let sizes = chunk_sizes(n);
    let rngs = chunk_rngs(seed, sizes.len());
    let chunks: Vec<Vec<f64>> = rngs
        .into_par_iter()
        .zip(sizes)
        .map(|(mut rng, size)| (0..size).map(|_| sampler.draw(&mut rng)).collect())
        .collect();
    Ok(chunks.concat())
}

/// `sum x^j` for `j = 1..=2 order`.
fn power_sums(xs: impl Iterator<Item = f64>, order: usize) -> Vec<f64> {
    let mut sums = vec![0.0; 2 * order + 1];
    for x in xs {
        let mut p = 1.0;
        for s in sums.iter_mut().skip(1) {
            p *= x;
            *s += p;
        }
    }
    sums
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentRow {
    pub order: usize,
    /// Exact prediction as `p/q`.
    pub prediction: String,
    pub prediction_value: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentComparison {
    pub model: String,
    pub n_samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub rows: Vec<MomentRow>,
}

impl MomentComparison {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }
}

fn check_order(max_order: usize) -> Result<()> {
    if max_order == 0 || max_order > MAX_ORDER {
        return Err(LabError::MaxOrder(max_order));
    }
    Ok(())
}

fn rows(predictions: &[Rational], sums: &[f64], n: usize, max_order: usize, tolerance: f64) -> Vec<MomentRow> {
    let nf = n as f64;
    (1..=max_order)
        .map(|k| {
            let mean = sums[k] / nf;
            let var = if n > 1 {
                ((sums[2 * k] - nf * mean * mean) / (nf - 1.0)).max(0.0)
            } else {
                0.0
            };
            let se = (var / nf).sqrt();
            let predicted = rational_to_f64(&predictions[k]);
            let diff = mean - predicted;
            let z = if se > 0.0 {
                diff / se
            } else if diff.abs() <= 1e-12 * predicted.abs().max(1.0) {
                0.0
            } else {
                f64::INFINITY.copysign(diff)
            };
            MomentRow {
                order: k,
                prediction: format_rational(&predictions[k]),
                prediction_value: predicted,
                empirical: mean,
                std_error: se,
                z,
                pass: z.abs() <= tolerance,
            }
        })
        .collect()
}

/// Empirical moments of `n` draws against the umbral predictions for `model`.
pub fn compare(model: &Model, n: usize, seed: u64, max_order: usize) -> Result<MomentComparison> {
    check_order(max_order)?;
    check_n(n)?;
    let predictions = model.predictions(max_order)?;
    let sampler = model.sampler();
    let sizes = chunk_sizes(n);
    let rngs = chunk_rngs(seed, sizes.len());
    let partial: Vec<Vec<f64>> = rngs
        .into_par_iter()
        .zip(sizes)
        .map(|(mut rng, size)| power_sums((0..size).map(|_| sampler.draw(&mut rng)), max_order))
        .collect();
    let mut sums = vec![0.0; 2 * max_order + 1];
    for chunk in &partial {
        for (s, c) in sums.iter_mut().zip(chunk) {
            *s += c;
        }
    }
    Ok(MomentComparison {
        model: model.to_string(),
        n_samples: n,
        seed,
        tolerance: DEFAULT_TOLERANCE,
        rows: rows(&predictions, &sums, n, max_order, DEFAULT_TOLERANCE),
    })
}

/// Compares given samples against the predictions for `model`.
pub fn compare_samples(
    model: &Model,
    label: &str,
    samples: &[f64],
    seed: u64,
    max_order: usize,
) -> Result<MomentComparison> {
    check_order(max_order)?;
    check_n(samples.len())?;
    let predictions = model.predictions(max_order)?;
    let sums = power_sums(samples.iter().copied(), max_order);
    Ok(MomentComparison {
        model: label.to_string(),
        n_samples: samples.len(),
        seed,
        tolerance: DEFAULT_TOLERANCE,
        rows: rows(&predictions, &sums, samples.len(), max_order, DEFAULT_TOLERANCE),
    })
}
