//! Ball packing capacities of the four-ball and the embedding decision.

mod certify;
mod dp;
mod report;

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exceptional::{exceptional_of_degree, ObstructionTuple};
use crate::scalar::{int, parse_rational, QuadraticValue, Rational};

pub use dp::{per_degree_max, tuple_ratio, tuple_value};
pub use report::CapacityValue;

/// Ball areas, kept sorted nonincreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BallConfig {
    sizes: Vec<Rational>,
}

impl BallConfig {
    pub fn new(mut sizes: Vec<Rational>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::Domain("at least one ball is required".into()));
        }
        if let Some(bad) = sizes.iter().find(|r| !r.is_positive()) {
            return Err(Error::Domain(format!(
                "ball sizes must be positive, got {bad}"
            )));
        }
        sizes.sort_by(|a, b| b.cmp(a));
        Ok(BallConfig { sizes })
    }

    /// Parses a comma separated list such as `"1,1,5/2"`.
    pub fn parse(text: &str) -> Result<Self> {
        let sizes = text
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        BallConfig::new(sizes)
    }

    pub fn equal(k: usize) -> Self {
        BallConfig {
            sizes: vec![Rational::one(); k.max(1)],
        }
    }

    pub fn sizes(&self) -> &[Rational] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn sum(&self) -> Rational {
        self.sizes.iter().fold(Rational::zero(), |a, r| a + r)
    }

    /// `sum R_i^2`.
    pub fn volume(&self) -> Rational {
        self.sizes.iter().fold(Rational::zero(), |a, r| a + r * r)
    }

    /// `sqrt(sum R_i^2)`.
    pub fn volume_bound(&self) -> QuadraticValue {
        QuadraticValue::sqrt(self.volume()).expect("volume is positive")
    }

    pub fn scale(&self, lambda: &Rational) -> Self {
        BallConfig::new(self.sizes.iter().map(|r| r * lambda).collect()).expect("positive scale")
    }

    pub fn push(&self, r: Rational) -> Result<Self> {
        let mut sizes = self.sizes.clone();
        sizes.push(r);
        BallConfig::new(sizes)
    }
}

impl fmt::Display for BallConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .sizes
            .iter()
            .map(crate::scalar::format_rational)
            .collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for BallConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parts: Vec<String> = self
            .sizes
            .iter()
            .map(crate::scalar::format_rational)
            .collect();
        parts.serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Every tuple satisfying the packing constraint, maximized per degree.
    #[serde(rename = "full")]
    FullTuples,
    /// Exceptional classes only.
    #[serde(rename = "exceptional")]
    ExceptionalOnly,
    /// Exceptional classes first, full tuples when that does not certify.
    #[default]
    Combined,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::FullTuples => "full",
            Engine::ExceptionalOnly => "exceptional",
            Engine::Combined => "combined",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" | "full-tuples" => Ok(Engine::FullTuples),
            "exceptional" | "exceptional-only" => Ok(Engine::ExceptionalOnly),
            "combined" => Ok(Engine::Combined),
            other => Err(Error::Parse(format!("unknown engine {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attainment {
    Yes,
    No,
    Unknown,
}

/// Certified enclosure of a packing capacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityResult {
    pub lower: QuadraticValue,
    pub upper: QuadraticValue,
    pub attained: Attainment,
    pub witness: Option<ObstructionTuple>,
    /// Largest degree examined.
    pub degree_searched: u32,
    /// Degree at which exactness was certified.
    pub certified_degree: Option<u32>,
    pub engine: Engine,
}

impl CapacityResult {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn exact_value(&self) -> Option<&QuadraticValue> {
        self.is_exact().then_some(&self.lower)
    }

    pub fn contains(&self, x: &QuadraticValue) -> bool {
        self.lower <= *x && *x <= self.upper
    }

    pub fn scale(&self, lambda: &Rational) -> Self {
        CapacityResult {
            lower: self.lower.scale(lambda),
            upper: self.upper.scale(lambda),
            ..self.clone()
        }
    }
}

/// Capacity of the configuration: the infimum of `R` such that the balls
/// pack into the open ball of size `R`.
pub fn packing_capacity(c: &BallConfig, d_budget: u32, engine: Engine) -> Result<CapacityResult> {
    if d_budget == 0 {
        return Err(Error::Precondition(
            "degree budget must be at least 1".into(),
        ));
    }
    match engine {
        Engine::FullTuples | Engine::ExceptionalOnly => search(c, d_budget, engine),
        Engine::Combined => {
            let exc = search(c, d_budget, Engine::ExceptionalOnly)?;
            if exc.is_exact() && exc.attained != Attainment::Unknown {
                return Ok(CapacityResult {
                    engine: Engine::Combined,
                    ..exc
                });
            }
            let full = search(c, d_budget, Engine::FullTuples)?;
            Ok(intersect(c, exc, full))
        }
    }
}

fn intersect(c: &BallConfig, a: CapacityResult, b: CapacityResult) -> CapacityResult {
    let lower = a.lower.clone().max(b.lower.clone());
    let upper = a.upper.clone().min(b.upper.clone());
    let witness = [&a.witness, &b.witness]
        .into_iter()
        .flatten()
        .max_by(|x, y| tuple_ratio(x, c).cmp(&tuple_ratio(y, c)).then(y.cmp(x)))
        .cloned();
    let certified_degree = match (a.certified_degree, b.certified_degree) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    let attained = attainment(&lower, &upper, witness.as_ref(), c);
    CapacityResult {
        lower,
        upper,
        attained,
        witness,
        degree_searched: a.degree_searched.max(b.degree_searched),
        certified_degree,
        engine: Engine::Combined,
    }
}

fn attainment(
    lower: &QuadraticValue,
    upper: &QuadraticValue,
    witness: Option<&ObstructionTuple>,
    c: &BallConfig,
) -> Attainment {
    if lower != upper {
        return Attainment::Unknown;
    }
    if witness.is_some_and(|w| lower.cmp_rational(&tuple_ratio(w, c)).is_eq()) {
        return Attainment::Yes;
    }
    if !lower.is_rational() {
        // tuple ratios are rational
        return Attainment::No;
    }
    Attainment::Unknown
}

fn degree_best(
    c: &BallConfig,
    d: u32,
    engine: Engine,
) -> Result<Option<(Rational, ObstructionTuple)>> {
    match engine {
        Engine::FullTuples => {
            let (v, t) = per_degree_max(d, c)?;
            Ok(Some((v / int(d as i64), t)))
        }
        _ => {
            let classes = exceptional_of_degree(d, c.len() as u32)?;
            Ok(classes
                .iter()
                .map(|t| (tuple_ratio(t, c), t))
                .fold(
                    None,
                    |acc: Option<(Rational, &ObstructionTuple)>, (r, t)| match acc {
                        Some((br, bt)) if br >= r => Some((br, bt)),
                        _ => Some((r, t)),
                    },
                )
                .map(|(r, t)| (r, t.clone())))
        }
    }
}

fn search(c: &BallConfig, d_budget: u32, engine: Engine) -> Result<CapacityResult> {
    let volume = c.volume_bound();
    let mut best: Option<(Rational, ObstructionTuple)> = None;
    let mut certified_degree = None;
    let mut searched = 0;
    for d in 1..=d_budget {
        searched = d;
        if let Some((r, t)) = degree_best(c, d, engine)? {
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, t));
            }
        }
        let mu = candidate(&best, &volume);
        if certified_degree.is_none() {
            let ok = match engine {
                Engine::FullTuples => certify::full_tuples_certified(c, &mu, d),
                _ => certify::exceptional_certified(c, &mu, d),
            };
            if ok {
                certified_degree = Some(d);
            }
        }
        if certified_degree.is_some() {
            let reached = best
                .as_ref()
                .is_some_and(|(b, _)| mu.cmp_rational(b).is_eq());
            // A rational volume bound may still be attained by a later tuple.
            if reached || !mu.is_rational() || engine != Engine::FullTuples {
                break;
            }
        }
    }
    let lower = candidate(&best, &volume);
    let upper = if certified_degree.is_some() {
        lower.clone()
    } else {
        lower.clone().max(certify::tail_upper(c, searched))
    };
    let witness = best.map(|(_, t)| t);
    let attained = attainment(&lower, &upper, witness.as_ref(), c);
    Ok(CapacityResult {
        lower,
        upper,
        attained,
        witness,
        degree_searched: searched,
        certified_degree,
        engine,
    })
}

fn candidate(
    best: &Option<(Rational, ObstructionTuple)>,
    volume: &QuadraticValue,
) -> QuadraticValue {
    match best {
        Some((b, _)) if volume.cmp_rational(b).is_lt() => QuadraticValue::rational(b.clone()),
        _ => volume.clone(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Target is the open ball; the default.
    #[default]
    Open,
    Closed,
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" | "open-target" => Ok(Convention::Open),
            "closed" | "closed-target" => Ok(Convention::Closed),
            other => Err(Error::Parse(format!("unknown convention {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
    Undecided,
}

/// Decides whether the balls embed into the ball of size `r` from a
/// computed capacity enclosure.
pub fn decide_from_capacity(
    cap: &CapacityResult,
    r: &Rational,
    convention: Convention,
) -> Decision {
    let lo = cap.lower.cmp_rational(r);
    let hi = cap.upper.cmp_rational(r);
    match convention {
        Convention::Open => {
            if lo.is_ge() {
                Decision::No
            } else if hi.is_lt() {
                Decision::Yes
            } else {
                Decision::Undecided
            }
        }
        Convention::Closed => {
            if hi.is_le() {
                Decision::Yes
            } else if lo.is_gt() {
                Decision::No
            } else {
                Decision::Undecided
            }
        }
    }
}

/// Default degree budget used by the convenience entry points.
pub const DEFAULT_DEGREE_BUDGET: u32 = 60;

pub fn decide_packing(c: &BallConfig, r: &Rational, convention: Convention) -> Result<Decision> {
    decide_packing_with(c, r, convention, DEFAULT_DEGREE_BUDGET, Engine::Combined)
}

pub fn decide_packing_with(
    c: &BallConfig,
    r: &Rational,
    convention: Convention,
    d_budget: u32,
    engine: Engine,
) -> Result<Decision> {
    if !r.is_positive() {
        return Err(Error::Domain(format!(
            "target size must be positive, got {r}"
        )));
    }
    let cap = packing_capacity(c, d_budget, engine)?;
    Ok(decide_from_capacity(&cap, r, convention))
}

/// Enclosure of the largest packable volume fraction by `k` equal balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionResult {
    pub lower: Rational,
    pub upper: Rational,
    pub capacity: CapacityResult,
}

impl FractionResult {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }
}

pub fn equal_ball_fraction(k: usize, d_budget: u32) -> Result<FractionResult> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let capacity = packing_capacity(&BallConfig::equal(k), d_budget, Engine::Combined)?;
    let kq = int(k as i64);
    Ok(FractionResult {
        lower: &kq / capacity.upper.square(),
        upper: &kq / capacity.lower.square(),
        capacity,
    })
}
