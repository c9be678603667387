//! The ellipsoid-into-ball capacity function `f(x)`: the smallest ball into
//! which `E(1, x)` embeds, computed as the packing capacity of its weights.

use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::packing::{packing_capacity, CapacityResult, Engine};
use crate::scalar::{format_rational, rational_to_f64, Rational};
use crate::toric::ellipsoid_weights;

/// `f(x)` for rational `x >= 1`.
pub fn ms_value(x: &Rational, d_budget: u32) -> Result<CapacityResult> {
    if *x < Rational::one() {
        return Err(Error::Domain(format!("x must be at least 1, got {x}")));
    }
    let balls = ellipsoid_weights(&Rational::one(), x)?
        .balls()
        .expect("an ellipsoid has at least one weight");
    packing_capacity(&balls, d_budget, Engine::Combined)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StaircaseSample {
    #[serde(with = "crate::scalar::serde_rational")]
    pub x: Rational,
    pub value: CapacityResult,
}

impl StaircaseSample {
    pub const CSV_HEADER: [&'static str; 7] = [
        "x",
        "lower",
        "upper",
        "attained",
        "witness_d",
        "witness_m",
        "float_value",
    ];

    pub fn csv_record(&self) -> [String; 7] {
        let v = &self.value;
        let attained = serde_json::to_value(v.attained)
            .ok()
            .and_then(|s| s.as_str().map(str::to_owned))
            .unwrap_or_default();
        let (wd, wm) = match &v.witness {
            Some(t) => (
                t.d.to_string(),
                t.m.iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            None => (String::new(), String::new()),
        };
        let float = (v.lower.to_f64() + v.upper.to_f64()) / 2.0;
        [
            format_rational(&self.x),
            v.lower.to_string(),
            v.upper.to_string(),
            attained,
            wd,
            wm,
            significant(float, 12),
        ]
    }
}

/// Decimal rendering rounded to `digits` significant digits.
pub fn significant(v: f64, digits: usize) -> String {
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), v)
        .parse()
        .unwrap_or(v);
    format!("{rounded}")
}

/// Rows in increasing `x`; `status` is set when evaluation stopped early.
#[derive(Clone, Debug, Serialize)]
pub struct StaircaseTable {
    pub rows: Vec<StaircaseSample>,
    pub status: Option<String>,
}

/// Evaluates `f` on `x_from, x_from + step, ...` up to `x_to`.
pub fn sample_staircase(
    x_from: &Rational,
    x_to: &Rational,
    step: &Rational,
    d_budget: u32,
) -> Result<StaircaseTable> {
    if *x_from < Rational::one() || x_from > x_to {
        return Err(Error::Domain("need 1 <= from <= to".into()));
    }
    if !step.is_positive() {
        return Err(Error::Domain("step must be positive".into()));
    }
    let mut grid = Vec::new();
    let mut x = x_from.clone();
    while x <= *x_to {
        grid.push(x.clone());
        x += step;
    }
    let results: Vec<Result<CapacityResult>> =
        grid.par_iter().map(|x| ms_value(x, d_budget)).collect();
    let mut rows = Vec::with_capacity(grid.len());
    let mut status = None;
    for (x, r) in grid.into_iter().zip(results) {
        match r {
            Ok(value) => rows.push(StaircaseSample { x, value }),
            Err(e) => {
                status = Some(format!("stopped at x = {}: {e}", format_rational(&x)));
                break;
            }
        }
    }
    Ok(StaircaseTable { rows, status })
}

/// Float view of `x` for plotting.
pub fn x_to_f64(x: &Rational) -> f64 {
    rational_to_f64(x)
}
