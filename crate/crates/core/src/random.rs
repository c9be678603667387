//! Seeded generators for test and benchmark inputs.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::packing::BallConfig;
use crate::scalar::Rational;
use crate::toric::{ConcaveDomain, ConvexDomain, Point};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform rational in `[lo, hi]` with denominator dividing `den`.
pub fn rational_in(rng: &mut impl Rng, lo: &Rational, hi: &Rational, den: i64) -> Rational {
    let d = Rational::from_integer(den.into());
    let a = (lo * &d).ceil().to_integer();
    let b = (hi * &d).floor().to_integer();
    let a: i64 = a.try_into().expect("small bound");
    let b: i64 = b.try_into().expect("small bound");
    Rational::new(rng.gen_range(a..=b).into(), den.into())
}

/// Like [`rational_in`] with a denominator drawn from `1..=den_max`.
pub fn rational_up_to(rng: &mut impl Rng, lo: &Rational, hi: &Rational, den_max: i64) -> Rational {
    let den = rng.gen_range(1..=den_max);
    rational_in(rng, lo, hi, den)
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Between 1 and `k_max` balls with sizes in `[lo, hi]` and denominators up to `den_max`.
pub fn ball_config(
    rng: &mut impl Rng,
    k_max: usize,
    lo: &Rational,
    hi: &Rational,
    den_max: i64,
) -> BallConfig {
    let k = rng.gen_range(1..=k_max);
    let sizes = (0..k)
        .map(|_| rational_up_to(rng, lo, hi, den_max))
        .collect();
    BallConfig::new(sizes).expect("positive sizes")
}

/// Ellipsoid sides `(a, b)` in `[1/den_max, max]` with denominators up to `den_max`.
pub fn ellipsoid_sides(rng: &mut impl Rng, max: i64, den_max: i64) -> (Rational, Rational) {
    let mut side = || {
        let den = rng.gen_range(1..=den_max);
        rational_in(rng, &r(1, den), &r(max, 1), den)
    };
    (side(), side())
}

/// Strictly increasing slopes in `-[lo, hi]` made from `count` distinct values.
fn slopes(rng: &mut impl Rng, count: usize, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut s: Vec<Rational> = Vec::new();
    while s.len() < count {
        let v = rational_up_to(rng, lo, hi, 6);
        if !s.contains(&v) {
            s.push(v);
        }
    }
    s.sort();
    s
}

fn chain(start: Rational, steps: impl IntoIterator<Item = (Rational, Rational)>) -> Vec<Point> {
    let mut p = (Rational::zero(), start);
    let mut out = vec![p.clone()];
    for (dx, dy) in steps {
        p = (&p.0 + dx, &p.1 - dy);
        out.push(p.clone());
    }
    out
}

/// Concave domain with up to `max_edges` edges, slopes in `-[1/3, 3]`.
pub fn concave_domain(rng: &mut impl Rng, max_edges: usize) -> ConcaveDomain {
    let n = rng.gen_range(1..=max_edges);
    // steepest first
    let s: Vec<Rational> = slopes(rng, n, &r(1, 3), &r(3, 1))
        .into_iter()
        .rev()
        .collect();
    let steps: Vec<(Rational, Rational)> = s
        .into_iter()
        .map(|s| {
            let dx = rational_up_to(rng, &r(1, 4), &r(1, 1), 4);
            let dy = &dx * s;
            (dx, dy)
        })
        .collect();
    let height = steps.iter().fold(Rational::zero(), |acc, (_, dy)| acc + dy);
    ConcaveDomain::new(chain(height, steps)).expect("generated domain is valid")
}

/// Convex domain with up to `max_edges` sloped edges, optionally a
/// horizontal top edge and a vertical right edge.
pub fn convex_domain(rng: &mut impl Rng, max_edges: usize) -> ConvexDomain {
    let n = rng.gen_range(1..=max_edges);
    let mut steps = Vec::new();
    if rng.gen_bool(0.5) {
        steps.push((rational_in(rng, &r(1, 4), &r(1, 1), 4), Rational::zero()));
    }
    // shallowest first
    for s in slopes(rng, n, &r(1, 3), &r(3, 1)) {
        let dx = rational_up_to(rng, &r(1, 4), &r(1, 1), 4);
        let dy = &dx * s;
        steps.push((dx, dy));
    }
    if rng.gen_bool(0.5) {
        steps.push((Rational::zero(), rational_in(rng, &r(1, 4), &r(1, 1), 4)));
    }
    let height = steps.iter().fold(Rational::zero(), |acc, (_, dy)| acc + dy);
    ConvexDomain::new(chain(height, steps)).expect("generated domain is valid")
}
