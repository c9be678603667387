//! Fast invariant checks run by `sympack selfcheck`.

use serde::Serialize;

use sympack_core::ech::{ech_concave_prefix, ech_convex_prefix, ech_ellipsoid_prefix};
use sympack_core::exceptional::{enumerate_exceptional, is_exceptional_vector};
use sympack_core::packing::{equal_ball_fraction, packing_capacity};
use sympack_core::random::{ball_config, convex_domain, rational_up_to, seeded};
use sympack_core::scalar::{int, ratio};
use sympack_core::toric::{
    ellipsoid_weights, negative_weight_sequence, ConcaveDomain, ConvexDomain,
};
use sympack_core::Engine;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

type Step = Result<String, String>;

fn fractions() -> Step {
    let want = [
        ratio(1, 1),
        ratio(1, 2),
        ratio(3, 4),
        ratio(1, 1),
        ratio(4, 5),
        ratio(24, 25),
        ratio(63, 64),
        ratio(288, 289),
    ];
    for (i, w) in want.iter().enumerate() {
        let f = equal_ball_fraction(i + 1, 30).map_err(|e| e.to_string())?;
        if !(f.is_exact() && f.lower == *w) {
            return Err(format!("k={}: [{}, {}]", i + 1, f.lower, f.upper));
        }
    }
    Ok("k=1..8".into())
}

fn engines(seed: u64) -> Step {
    let mut rng = seeded(seed);
    for _ in 0..20 {
        let c = ball_config(&mut rng, 4, &ratio(1, 4), &int(2), 6);
        let a = packing_capacity(&c, 20, Engine::FullTuples).map_err(|e| e.to_string())?;
        let b = packing_capacity(&c, 20, Engine::ExceptionalOnly).map_err(|e| e.to_string())?;
        if a.lower > b.upper || b.lower > a.upper {
            return Err(format!("{c}: disjoint enclosures"));
        }
    }
    Ok("20 configurations".into())
}

fn weights(seed: u64) -> Step {
    let mut rng = seeded(seed);
    for _ in 0..100 {
        let a = rational_up_to(&mut rng, &ratio(1, 10), &int(5), 10);
        let b = rational_up_to(&mut rng, &ratio(1, 10), &int(5), 10);
        let w = ellipsoid_weights(&a, &b).map_err(|e| e.to_string())?;
        if w.sum_of_squares() != &a * &b {
            return Err(format!("E({a}, {b})"));
        }
        let omega = convex_domain(&mut rng, 4);
        let n = negative_weight_sequence(&omega).map_err(|e| e.to_string())?;
        let h = n.head.clone().unwrap_or_default();
        if &h * &h - n.sum_of_squares() != omega.area() * int(2) {
            return Err("convex area identity".into());
        }
    }
    Ok("100 ellipsoids, 100 convex domains".into())
}

fn ech(seed: u64) -> Step {
    let mut rng = seeded(seed);
    for _ in 0..10 {
        let a = rational_up_to(&mut rng, &int(1), &int(3), 4);
        let b = rational_up_to(&mut rng, &int(1), &int(3), 4);
        let e = ech_ellipsoid_prefix(&a, &b, 60).map_err(|e| e.to_string())?;
        let c = ech_concave_prefix(
            &ConcaveDomain::triangle(a.clone(), b.clone()).map_err(|e| e.to_string())?,
            60,
        )
        .map_err(|e| e.to_string())?;
        let v = ech_convex_prefix(
            &ConvexDomain::triangle(a.clone(), b.clone()).map_err(|e| e.to_string())?,
            60,
            None,
        )
        .map_err(|e| e.to_string())?;
        if e != c || e != v {
            return Err(format!("E({a}, {b})"));
        }
    }
    Ok("10 ellipsoids to k=60".into())
}

fn exceptional() -> Step {
    let list = enumerate_exceptional(4, 12).map_err(|e| e.to_string())?;
    if list.is_empty() || !list.iter().all(is_exceptional_vector) {
        return Err(format!("{} classes to degree 4", list.len()));
    }
    Ok(format!("{} classes to degree 4", list.len()))
}

pub fn run(seed: u64) -> Report {
    let steps: [(&'static str, Box<dyn Fn() -> Step>); 5] = [
        ("equal-ball fractions", Box::new(fractions)),
        ("engine enclosures overlap", Box::new(move || engines(seed))),
        ("weight identities", Box::new(move || weights(seed))),
        ("ECH routes agree", Box::new(move || ech(seed))),
        ("exceptional classes", Box::new(exceptional)),
    ];
    let checks = steps
        .into_iter()
        .map(|(name, f)| {
            let r = f();
            Check {
                name,
                pass: r.is_ok(),
                detail: r.unwrap_or_else(|e| e),
            }
        })
        .collect();
    Report { seed, checks }
}
