//! On-site potential sequences for the four chain families.
//!
//! Sites are numbered `1..=N` when evaluating position-dependent formulas;
//! the returned vectors are zero-based (`v[0]` is site 1).

use std::f64::consts::PI;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Golden ratio, the default irrational frequency of the AAF potential.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Upper bound on the length of a generated Fibonacci word.
pub const MAX_WORD_LENGTH: usize = 1 << 24;

/// System sizes used for finite-size scaling fits.
pub const FIBONACCI_LADDER: [usize; 6] = [89, 144, 233, 377, 610, 987];

/// Arguments with magnitude below this resolve to `+1` in the `beta = inf` sign.
const SIGN_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symbol {
    A,
    B,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::A => 'A',
            Symbol::B => 'B',
        }
    }
}

/// Deformation parameter of the AAF potential. Serialized as a number, or
/// as the string `"inf"` for the Fibonacci limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Serialize for Beta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Beta::Finite(b) => s.serialize_f64(*b),
            Beta::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(b) => Ok(Beta::Finite(b)),
            Raw::Text(t) => Beta::parse(&t).map_err(serde::de::Error::custom),
        }
    }
}

impl Beta {
    pub fn parse(s: &str) -> Result<Beta> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(Beta::Infinite),
            other => other
                .parse::<f64>()
                .map(|b| {
                    if b.is_infinite() {
                        Beta::Infinite
                    } else {
                        Beta::Finite(b)
                    }
                })
                .map_err(|_| Error::Parameter(format!("cannot parse beta from {s:?}"))),
        }
    }
}

impl std::fmt::Display for Beta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AafParams {
    pub lambda: f64,
    pub beta: Beta,
    #[serde(default)]
    pub phi: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    GOLDEN_RATIO
}

impl AafParams {
    pub fn new(lambda: f64, beta: Beta) -> Self {
        AafParams {
            lambda,
            beta,
            phi: 0.0,
            alpha: GOLDEN_RATIO,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::Parameter(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if let Beta::Finite(b) = self.beta {
            if !(b >= 0.0) || !b.is_finite() {
                return Err(Error::Parameter(format!("beta must be >= 0, got {b}")));
            }
        }
        if !self.alpha.is_finite() || !self.phi.is_finite() {
            return Err(Error::Parameter("alpha and phi must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FibonacciWordParams {
    pub order: usize,
    pub v_a: f64,
    pub v_b: f64,
}

impl FibonacciWordParams {
    /// Chain with `V_A = v`, `V_B = -v` whose word has exactly `n_sites`
    /// symbols, if `n_sites` is a Fibonacci number.
    pub fn for_size(n_sites: usize, v: f64) -> Result<Self> {
        let order = fibonacci_order(n_sites)
            .ok_or_else(|| Error::Parameter(format!("{n_sites} is not a Fibonacci word length")))?;
        Ok(FibonacciWordParams { order, v_a: v, v_b: -v })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlternatingParams {
    pub v_a: f64,
    pub v_b: f64,
    #[serde(default = "default_spacing")]
    pub spacing_a: f64,
}

fn default_spacing() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomDisorderParams {
    pub center: f64,
    pub halfwidth: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Aaf(AafParams),
    Fibonacci(FibonacciWordParams),
    Alternating(AlternatingParams),
    Random(RandomDisorderParams),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub model: Model,
    pub n_sites: usize,
    #[serde(default)]
    pub boundary: Boundary,
}

impl ChainSpec {
    pub fn new(model: Model, n_sites: usize) -> Self {
        ChainSpec {
            model,
            n_sites,
            boundary: Boundary::Open,
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// On-site potentials `V_1..V_N` of this chain.
    ///
    /// A Fibonacci model uses the first `n_sites` symbols of its word, so the
    /// word must be at least that long.
    pub fn potentials(&self) -> Result<Vec<f64>> {
        let n = self.n_sites;
        check_sites(n)?;
        match self.model {
            Model::Aaf(p) => {
                p.validate()?;
                aaf_potentials(&p, n)
            }
            Model::Alternating(p) => alternating_potentials(&p, n),
            Model::Random(p) => random_potentials(&p, n),
            Model::Fibonacci(p) => {
                let word = fibonacci_word(p.order)?;
                if word.len() < n {
                    return Err(Error::Parameter(format!(
                        "Fibonacci word of order {} has {} symbols, chain needs {n}",
                        p.order,
                        word.len()
                    )));
                }
                Ok(word
                    .iter()
                    .take(n)
                    .map(|s| match s {
                        Symbol::A => p.v_a,
                        Symbol::B => p.v_b,
                    })
                    .collect())
            }
        }
    }
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites < 2 {
        return Err(Error::Parameter(format!(
            "a chain needs at least 2 sites, got {n_sites}"
        )));
    }
    Ok(())
}

/// Length of the Fibonacci word of the given order (`F_1 = 1`, `F_2 = 2`).
/// Returns `None` on overflow.
pub fn fibonacci_length(order: usize) -> Option<usize> {
    if order == 0 {
        return None;
    }
    let (mut prev, mut cur) = (1usize, 1usize);
    for _ in 0..order {
        let next = prev.checked_add(cur)?;
        prev = cur;
        cur = next;
    }
    Some(prev)
}

/// Order `n` with `fibonacci_length(n) == len`, if any.
pub fn fibonacci_order(len: usize) -> Option<usize> {
    (1..90)
        .map_while(|n| fibonacci_length(n).map(|l| (n, l)))
        .find(|&(_, l)| l == len)
        .map(|(n, _)| n)
}

/// Word obtained from the seed `A` by applying `A -> AB`, `B -> A`
/// `order - 1` times.
pub fn fibonacci_word(order: usize) -> Result<Vec<Symbol>> {
    if order == 0 {
        return Err(Error::Parameter("Fibonacci word order must be >= 1".into()));
    }
    let length = fibonacci_length(order).unwrap_or(usize::MAX);
    if length > MAX_WORD_LENGTH {
        return Err(Error::SizeLimit {
            order,
            length,
            cap: MAX_WORD_LENGTH,
        });
    }
    let mut word = vec![Symbol::A];
    for _ in 1..order {
        let mut next = Vec::with_capacity(word.len() * 2);
        for &s in &word {
            match s {
                Symbol::A => next.extend([Symbol::A, Symbol::B]),
                Symbol::B => next.push(Symbol::A),
            }
        }
        word = next;
    }
    Ok(word)
}

pub fn word_to_string(word: &[Symbol]) -> String {
    word.iter().map(|s| s.as_char()).collect()
}

/// AAF potential `V_i = -lambda * tanh[beta (cos(2 pi alpha i + phi) - cos(pi alpha))] / tanh(beta)`
/// for `i = 1..=n_sites`.
///
/// `beta = 0` and `beta = inf` are evaluated through their closed-form limits
/// (the bare cosine and the sign function).
pub fn aaf_potentials(params: &AafParams, n_sites: usize) -> Result<Vec<f64>> {
    check_sites(n_sites)?;
    Ok((1..=n_sites).map(|i| aaf_potential_at(params, i as f64)).collect())
}

/// AAF potential at a single (possibly non-integer) site position.
pub fn aaf_potential_at(params: &AafParams, site: f64) -> f64 {
    let x = (2.0 * PI * params.alpha * site + params.phi).cos() - (PI * params.alpha).cos();
    let lambda = params.lambda;
    match params.beta {
        Beta::Infinite => {
            if x.abs() < SIGN_TIE_TOLERANCE || x > 0.0 {
                -lambda
            } else {
                lambda
            }
        }
        Beta::Finite(0.0) => -lambda * x,
        Beta::Finite(b) => -lambda * (b * x).tanh() / b.tanh(),
    }
}

/// `v_a` on odd sites and `v_b` on even sites (1-based).
pub fn alternating_potentials(params: &AlternatingParams, n_sites: usize) -> Result<Vec<f64>> {
    check_sites(n_sites)?;
    Ok((1..=n_sites)
        .map(|i| if i % 2 == 1 { params.v_a } else { params.v_b })
        .collect())
}

/// Independent uniform draws on `[center - halfwidth, center + halfwidth)`.
///
/// The generator is xoshiro256++ with its state filled from the 64-bit seed
/// by SplitMix64. Each draw takes the top 53 bits of one output word as a
/// uniform `u` in `[0, 1)` and maps it to `center + halfwidth * (2u - 1)`,
/// so a seed gives the same sequence on every platform.
pub fn random_potentials(params: &RandomDisorderParams, n_sites: usize) -> Result<Vec<f64>> {
    check_sites(n_sites)?;
    if !(params.halfwidth >= 0.0) {
        return Err(Error::Parameter(format!(
            "disorder halfwidth must be >= 0, got {}",
            params.halfwidth
        )));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(params.seed);
    Ok((0..n_sites)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            params.center + params.halfwidth * (2.0 * u - 1.0)
        })
        .collect())
}
