//! Obstruction tuples `(d; m_1 >= ... >= m_k)` and exceptional classes.
//!
//! A tuple stands for the class `dA - sum m_i E_i` in the plane blown up at
//! `k` points. It is exceptional when it has self-intersection `-1`, pairs to
//! `1` with the anticanonical class, and reduces under Cremona moves to the
//! class of a single exceptional divisor.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTuple")]
pub struct ObstructionTuple {
    pub d: i64,
    pub m: Vec<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTuple {
    d: i64,
    m: Vec<i64>,
}

impl TryFrom<RawTuple> for ObstructionTuple {
    type Error = Error;
    fn try_from(raw: RawTuple) -> Result<Self> {
        ObstructionTuple::canonical(raw.d, raw.m)
    }
}

impl ObstructionTuple {
    /// Sorts `m` nonincreasing and trims trailing zeros. Entries may be negative.
    pub fn new(d: i64, mut m: Vec<i64>) -> Self {
        m.sort_unstable_by(|a, b| b.cmp(a));
        while m.last() == Some(&0) {
            m.pop();
        }
        ObstructionTuple { d, m }
    }

    /// Like [`ObstructionTuple::new`] but rejects negative entries and the zero tuple.
    pub fn canonical(d: i64, m: Vec<i64>) -> Result<Self> {
        if d < 0 || m.iter().any(|&x| x < 0) {
            return Err(Error::Domain(format!(
                "tuple entries must be nonnegative: d={d}, m={m:?}"
            )));
        }
        let t = ObstructionTuple::new(d, m);
        if t.d == 0 && t.m.is_empty() {
            return Err(Error::Domain("tuple must not be identically zero".into()));
        }
        Ok(t)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.d >= 0 && self.m.iter().all(|&x| x >= 0)
    }

    /// `d^2 - sum m_i^2`, the self-intersection of the class.
    pub fn self_intersection(&self) -> i128 {
        let d = self.d as i128;
        d * d
            - self
                .m
                .iter()
                .map(|&x| (x as i128) * (x as i128))
                .sum::<i128>()
    }

    /// `3d - sum m_i`, the pairing with the anticanonical class.
    pub fn anticanonical_degree(&self) -> i128 {
        3 * self.d as i128 - self.m.iter().map(|&x| x as i128).sum::<i128>()
    }

    pub fn sum_m(&self) -> i64 {
        self.m.iter().sum()
    }
}

impl fmt::Display for ObstructionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.d)?;
        for (i, x) in self.m.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, " {x}")?;
        }
        f.write_str(")")
    }
}

/// Parses `"(d; m1, m2, ...)"` or `"d;m1,m2,..."`.
impl std::str::FromStr for ObstructionTuple {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a tuple \"(d; m1, ...)\": {text:?}"));
        let s = text.trim();
        let s = s
            .strip_prefix('(')
            .map_or(s, |r| r.strip_suffix(')').unwrap_or(r));
        let (d, rest) = s.split_once(';').unwrap_or((s, ""));
        let d = d.trim().parse::<i64>().map_err(|_| bad())?;
        let m = rest
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<i64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ObstructionTuple::new(d, m))
    }
}

/// `sum (m_i^2 + m_i) <= d^2 + 3d`.
pub fn satisfies_packing_constraint(t: &ObstructionTuple) -> bool {
    let d = t.d as i128;
    let lhs: i128 = t.m.iter().map(|&x| (x as i128) * (x as i128 + 1)).sum();
    lhs <= d * d + 3 * d
}

/// Standard quadratic Cremona move on the three largest multiplicities.
pub fn cremona_transform(t: &ObstructionTuple) -> ObstructionTuple {
    let mut m = t.m.clone();
    m.sort_unstable_by(|a, b| b.cmp(a));
    while m.len() < 3 {
        m.push(0);
    }
    let d = t.d;
    let (m1, m2, m3) = (m[0], m[1], m[2]);
    m[0] = d - m2 - m3;
    m[1] = d - m1 - m3;
    m[2] = d - m1 - m2;
    ObstructionTuple::new(2 * d - m1 - m2 - m3, m)
}

/// Membership in the exceptional class set, decided by Cremona reduction.
pub fn is_exceptional_vector(t: &ObstructionTuple) -> bool {
    if t.d < 1 || !t.is_nonnegative() {
        return false;
    }
    if t.self_intersection() != -1 || t.anticanonical_degree() != 1 {
        return false;
    }
    let mut cur = ObstructionTuple::new(t.d, t.m.clone());
    // d strictly decreases on every move, so this bound is never the limiting factor.
    let max_moves = t.d as usize + t.m.len() + 3;
    for _ in 0..=max_moves {
        if cur.d == 0 {
            return is_single_minus_one(&cur.m);
        }
        if cur.d < 0 || cur.m.iter().any(|&x| x < 0) {
            return false;
        }
        let top: i64 = cur.m.iter().take(3).sum();
        if top <= cur.d {
            return false;
        }
        cur = cremona_transform(&cur);
    }
    false
}

fn is_single_minus_one(m: &[i64]) -> bool {
    m.iter().filter(|&&x| x == -1).count() == 1 && m.iter().all(|&x| x == 0 || x == -1)
}

/// Default cap on search nodes for [`enumerate_exceptional`].
pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;

/// All exceptional vectors with `1 <= d <= d_max` and at most `k_max`
/// nonzero multiplicities, sorted by degree then lexicographically.
pub fn enumerate_exceptional(d_max: u32, k_max: u32) -> Result<Vec<ObstructionTuple>> {
    enumerate_exceptional_with_budget(d_max, k_max, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_exceptional_with_budget(
    d_max: u32,
    k_max: u32,
    node_budget: u64,
) -> Result<Vec<ObstructionTuple>> {
    if d_max < 1 || k_max < 1 {
        return Err(Error::Precondition(
            "d_max and k_max must be at least 1".into(),
        ));
    }
    let mut nodes = 0u64;
    let mut out = Vec::new();
    for d in 1..=d_max {
        let mut level = exceptional_of_degree_counted(d, k_max, node_budget, &mut nodes).map_err(
            |e| match e {
                Error::Budget { value, detail, .. } => Error::Budget {
                    bound: "d_max",
                    value: d_max as u64,
                    detail: format!("{detail}; exhausted at degree {d} (nodes {value})"),
                },
                e => e,
            },
        )?;
        out.append(&mut level);
    }
    Ok(out)
}

type DegreeCache = HashMap<(u32, u32), Arc<Vec<ObstructionTuple>>>;

static CACHE: Lazy<Mutex<DegreeCache>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Exceptional vectors of one degree with at most `k_max` entries. Memoized.
pub fn exceptional_of_degree(d: u32, k_max: u32) -> Result<Arc<Vec<ObstructionTuple>>> {
    let k_eff = k_max.min(3 * d);
    if let Some(hit) = CACHE.lock().get(&(d, k_eff)) {
        return Ok(hit.clone());
    }
    let mut nodes = 0u64;
    let list = Arc::new(exceptional_of_degree_counted(
        d,
        k_eff,
        DEFAULT_NODE_BUDGET,
        &mut nodes,
    )?);
    CACHE.lock().insert((d, k_eff), list.clone());
    Ok(list)
}

fn exceptional_of_degree_counted(
    d: u32,
    k_max: u32,
    node_budget: u64,
    nodes: &mut u64,
) -> Result<Vec<ObstructionTuple>> {
    let d = d as i64;
    let sum = 3 * d - 1;
    let sumsq = d * d + 1;
    let mut found = Vec::new();
    let mut prefix = Vec::new();
    let mut search = MultisetSearch {
        nodes,
        budget: node_budget,
        found: &mut found,
    };
    search.run(&mut prefix, sum, sumsq, d.max(1), k_max as i64)?;
    let mut out: Vec<ObstructionTuple> = found
        .into_iter()
        .map(|m| ObstructionTuple::new(d, m))
        .filter(is_exceptional_vector)
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Nonincreasing positive integer sequences with prescribed sum and sum of squares.
struct MultisetSearch<'a> {
    nodes: &'a mut u64,
    budget: u64,
    found: &'a mut Vec<Vec<i64>>,
}

impl MultisetSearch<'_> {
    fn run(
        &mut self,
        prefix: &mut Vec<i64>,
        sum: i64,
        sumsq: i64,
        cap: i64,
        slots: i64,
    ) -> Result<()> {
        *self.nodes += 1;
        if *self.nodes > self.budget {
            return Err(Error::Budget {
                bound: "node_budget",
                value: self.budget,
                detail: "exceptional multiset search".into(),
            });
        }
        if sum == 0 {
            if sumsq == 0 {
                self.found.push(prefix.clone());
            }
            return Ok(());
        }
        if slots == 0 || cap == 0 || sum > slots * cap || sumsq < sum {
            return Ok(());
        }
        let max_sq = (sum / cap) * cap * cap + (sum % cap) * (sum % cap);
        let (q, r) = (sum / slots, sum % slots);
        let min_sq = r * (q + 1) * (q + 1) + (slots - r) * q * q;
        if sumsq > max_sq || sumsq < min_sq {
            return Ok(());
        }
        let lo = (sum + slots - 1) / slots;
        let hi = cap.min(sum).min(isqrt(sumsq));
        for x in (lo.max(1)..=hi).rev() {
            prefix.push(x);
            self.run(prefix, sum - x, sumsq - x * x, x, slots - 1)?;
            prefix.pop();
        }
        Ok(())
    }
}

fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}
