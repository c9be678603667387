//! Index and energy bookkeeping for curve classes in `2n` dimensions, and
//! the equal-ball and two-ball evaluators built on it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exceptional::ObstructionTuple;
use crate::packing::{equal_ball_fraction, BallConfig};
use crate::scalar::{format_rational, int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HigherDimProblem {
    pub n: u32,
    pub sizes: BallConfig,
    pub target: Rational,
}

impl HigherDimProblem {
    pub fn new(n: u32, sizes: BallConfig, target: Rational) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!(
                "dimension parameter n must be at least 2, got {n}"
            )));
        }
        if target <= Rational::zero() {
            return Err(Error::Domain("target size must be positive".into()));
        }
        Ok(HigherDimProblem { n, sizes, target })
    }

    /// First pair `(i, j)` with `R_i + R_j > R`.
    pub fn pairwise_violation(&self) -> Option<(usize, usize)> {
        let s = self.sizes.sizes();
        (s.len() >= 2 && &s[0] + &s[1] > self.target).then_some((0, 1))
    }
}

/// `(n-3)(2-2g) + 2(n+1)d - 2(n-1) sum m_i`.
pub fn fredholm_index(n: u32, g: u32, t: &ObstructionTuple) -> i128 {
    let n = n as i128;
    let g = g as i128;
    let sum: i128 = t.m.iter().map(|&x| x as i128).sum();
    (n - 3) * (2 - 2 * g) + 2 * (n + 1) * t.d as i128 - 2 * (n - 1) * sum
}

/// `dR - sum m_i R_i`, multiplicities paired with sizes in nonincreasing order.
pub fn curve_energy(p: &HigherDimProblem, t: &ObstructionTuple) -> Result<Rational> {
    if t.m.len() > p.sizes.len() {
        return Err(Error::Precondition(format!(
            "tuple has {} multiplicities but only {} balls",
            t.m.len(),
            p.sizes.len()
        )));
    }
    let used =
        t.m.iter()
            .zip(p.sizes.sizes())
            .fold(Rational::zero(), |acc, (&m, r)| acc + r * int(m));
    Ok(&p.target * int(t.d) - used)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub tuple: ObstructionTuple,
    #[serde(with = "crate::scalar::serde_rational")]
    pub energy: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionScan {
    pub n: u32,
    pub d_max: u32,
    /// Canonical tuples with `1 <= d <= d_max`, `m_i <= d`, at most `k`
    /// entries and nonnegative genus-zero index.
    pub scanned: u128,
    pub violation_count: u64,
    /// First violations found, in degree order.
    pub violations: Vec<Violation>,
}

/// Violations kept in a report.
pub const MAX_REPORTED: usize = 1000;

/// Checks that no curve class with nonnegative index has negative energy,
/// assuming every pair of balls fits side by side (`R_i + R_j <= R`).
pub fn verify_no_new_obstruction(
    n: u32,
    p: &HigherDimProblem,
    d_max: u32,
) -> Result<ObstructionScan> {
    if n < 3 {
        return Err(Error::Precondition(format!(
            "n must be at least 3, got {n}"
        )));
    }
    if let Some((i, j)) = p.pairwise_violation() {
        let s = p.sizes.sizes();
        return Err(Error::Precondition(format!(
            "balls {i} and {j} violate R_i + R_j <= R: {} + {} > {}",
            format_rational(&s[i]),
            format_rational(&s[j]),
            format_rational(&p.target)
        )));
    }
    Ok(scan_obstructions(n, p, d_max))
}

/// The enumeration behind [`verify_no_new_obstruction`], without its hypothesis check.
pub fn scan_obstructions(n: u32, p: &HigherDimProblem, d_max: u32) -> ObstructionScan {
    let per_degree: Vec<(u128, Vec<Violation>, u64)> = (1..=d_max)
        .into_par_iter()
        .map(|d| {
            let cap = max_sum(n, d);
            let k = p.sizes.len();
            let count = count_tuples(d as usize, k, cap);
            let mut found = Vec::new();
            let mut total = 0u64;
            let mut search = Search {
                sizes: p.sizes.sizes(),
                limit: &p.target * int(d as i64),
                found: &mut found,
                total: &mut total,
                m: Vec::with_capacity(k),
            };
            search.run(Rational::zero(), d as i64, cap);
            let tuples = found
                .into_iter()
                .map(|m| {
                    let tuple = ObstructionTuple::new(d as i64, m);
                    let energy = curve_energy(p, &tuple).expect("length checked");
                    Violation { tuple, energy }
                })
                .collect();
            (count, tuples, total)
        })
        .collect();
    let mut report = ObstructionScan {
        n,
        d_max,
        scanned: 0,
        violation_count: 0,
        violations: Vec::new(),
    };
    for (count, v, total) in per_degree {
        report.scanned += count;
        report.violation_count += total;
        let room = MAX_REPORTED - report.violations.len();
        report.violations.extend(v.into_iter().take(room));
    }
    report
}

/// Largest `sum m_i` with nonnegative genus-zero index at degree `d`.
fn max_sum(n: u32, d: u32) -> i64 {
    let n = n as i64;
    let top = 2 * (n - 3) + 2 * (n + 1) * d as i64;
    Integer::div_floor(&top, &(2 * (n - 1)))
}

/// Nonincreasing sequences of `k` integers in `[0, cap_each]` with sum at most `cap_sum`.
fn count_tuples(cap_each: usize, k: usize, cap_sum: i64) -> u128 {
    let s_max = cap_sum.max(0) as usize;
    // ways[j][s]: nonincreasing length-`step` sequences with entries <= j summing to s
    let mut ways = vec![vec![0u128; s_max + 1]; cap_each + 1];
    for row in ways.iter_mut() {
        row[0] = 1;
    }
    for _ in 0..k {
        let mut next = vec![vec![0u128; s_max + 1]; cap_each + 1];
        for j in 0..=cap_each {
            for s in 0..=s_max {
                // first entry exactly j, or all entries <= j - 1
                let mut v = if j > 0 { next[j - 1][s] } else { 0 };
                if s >= j {
                    v += ways[j][s - j];
                }
                next[j][s] = v;
            }
        }
        ways = next;
    }
    ways[cap_each].iter().sum::<u128>()
}

struct Search<'a> {
    sizes: &'a [Rational],
    limit: Rational,
    found: &'a mut Vec<Vec<i64>>,
    total: &'a mut u64,
    m: Vec<i64>,
}

impl Search<'_> {
    /// Greedy bound on what positions `from..` can still add.
    fn completion(&self, from: usize, cap: i64, mut left: i64) -> Rational {
        let mut acc = Rational::zero();
        for r in &self.sizes[from..] {
            if left <= 0 {
                break;
            }
            let take = cap.min(left);
            acc += r * int(take);
            left -= take;
        }
        acc
    }

    fn run(&mut self, value: Rational, cap: i64, left: i64) {
        let i = self.m.len();
        if value > self.limit {
            *self.total += 1;
            if self.found.len() < MAX_REPORTED {
                self.found.push(self.m.clone());
            }
        }
        if i == self.sizes.len() || left <= 0 || cap <= 0 {
            return;
        }
        // later entries only add more; prune when even the best completion stays within R d
        for x in (1..=cap.min(left)).rev() {
            let v = &value + &self.sizes[i] * int(x);
            if &v + self.completion(i + 1, x, left - x) <= self.limit {
                continue;
            }
            self.m.push(x);
            self.run(v, x, left - x);
            self.m.pop();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Known,
    Conjectural,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    /// `"conjectural"` for a yes, `"proved necessary"` for a no.
    pub status: &'static str,
    pub volume_ok: bool,
    pub two_ball_ok: bool,
}

/// Volume and two-ball conditions for packing `2n`-dimensional balls.
pub fn volume_and_two_ball_feasible(p: &HigherDimProblem) -> Result<Feasibility> {
    if p.n < 3 {
        return Err(Error::Precondition(format!(
            "n must be at least 3, got {}",
            p.n
        )));
    }
    let vol = p
        .sizes
        .sizes()
        .iter()
        .fold(Rational::zero(), |acc, r| acc + Pow::pow(r, p.n));
    let volume_ok = vol < Pow::pow(&p.target, p.n);
    let s = p.sizes.sizes();
    let two_ball_ok = s.len() < 2 || &s[0] + &s[1] < p.target;
    let feasible = volume_ok && two_ball_ok;
    Ok(Feasibility {
        feasible,
        status: if feasible {
            "conjectural"
        } else {
            "proved necessary"
        },
        volume_ok,
        two_ball_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EqualPackingValue {
    #[serde(with = "crate::scalar::serde_rational")]
    pub lower: Rational,
    #[serde(with = "crate::scalar::serde_rational")]
    pub upper: Rational,
    pub status: Status,
    pub note: String,
}

impl EqualPackingValue {
    pub fn value(&self) -> Option<&Rational> {
        (self.lower == self.upper).then_some(&self.lower)
    }
}

/// `ceil((17/6)^n)`, the count beyond which equal packings fill the volume.
pub fn full_filling_threshold(n: u32) -> BigInt {
    let q = Pow::pow(Rational::new(17.into(), 6.into()), n);
    q.ceil().to_integer()
}

fn is_perfect_power(k: u64, n: u32) -> bool {
    let r = (k as f64).powf(1.0 / n as f64).round() as u64;
    (r.saturating_sub(1)..=r + 1).any(|c| BigInt::from(c).pow(n) == BigInt::from(k))
}

/// Largest fraction of the `2n`-ball's volume fillable by `k` equal balls.
pub fn equal_packing_value(n: u32, k: u64, d_budget: u32) -> Result<EqualPackingValue> {
    if n < 2 || k < 1 {
        return Err(Error::Domain("need n >= 2 and k >= 1".into()));
    }
    if n == 2 {
        let f = equal_ball_fraction(k as usize, d_budget)?;
        let exact = f.is_exact();
        return Ok(EqualPackingValue {
            lower: f.lower,
            upper: f.upper,
            status: if exact {
                Status::Known
            } else {
                Status::Conjectural
            },
            note: if exact {
                "four-dimensional packing capacity, certified".into()
            } else {
                "four-dimensional packing capacity, not certified within the degree budget".into()
            },
        });
    }
    let two_n = BigInt::one() << n as usize;
    let one = || Rational::one();
    let (value, status, note) = if BigInt::from(k) <= two_n {
        let half = BigInt::one() << (n as usize - 1);
        let note = if BigInt::from(k) > half {
            "k/2^n, extended to 2^(n-1) < k < 2^n by the two-ball bound and the packings for k <= 2^n"
        } else {
            "k/2^n by the two-ball bound and the packings for k <= 2^n"
        };
        (
            Rational::new(k.into(), two_n),
            Status::Known,
            note.to_string(),
        )
    } else if BigInt::from(k) >= full_filling_threshold(n) {
        (
            one(),
            Status::Known,
            format!("k >= {}", full_filling_threshold(n)),
        )
    } else if is_perfect_power(k, n) {
        (
            one(),
            Status::Known,
            "k is a perfect n-th power".to_string(),
        )
    } else {
        (
            one(),
            Status::Conjectural,
            format!(
                "2^n < k < {} and k is not an n-th power",
                full_filling_threshold(n)
            ),
        )
    };
    Ok(EqualPackingValue {
        lower: value.clone(),
        upper: value,
        status,
        note,
    })
}
