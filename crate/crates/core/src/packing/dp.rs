//! Exact per-degree maximization of `sum m_i R_i` subject to
//! `sum (m_i^2 + m_i) <= d^2 + 3d`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exceptional::ObstructionTuple;
use crate::scalar::{common_denominator, Rational};

use super::BallConfig;

/// Cost of spreading `s` units over `g` equal balls as evenly as possible.
fn group_cost(g: u64, s: u64) -> u64 {
    let (q, r) = (s / g, s % g);
    r * (q + 1) * (q + 2) + (g - r) * q * (q + 1)
}

fn balanced(g: u64, s: u64) -> impl Iterator<Item = i64> {
    let (q, r) = (s / g, s % g);
    (0..g).map(move |i| (q + u64::from(i < r)) as i64)
}

struct Group {
    scaled: i128,
    count: u64,
}

fn groups(c: &BallConfig) -> Result<(Vec<Group>, BigInt)> {
    let den = common_denominator(c.sizes());
    let mut out: Vec<Group> = Vec::new();
    for r in c.sizes() {
        let n = (r * Rational::from_integer(den.clone())).to_integer();
        let n = n
            .to_i128()
            .filter(|v| v.abs() < 1i128 << 90)
            .ok_or_else(|| Error::Overflow(format!("scaled size {n} too large")))?;
        match out.last_mut() {
            Some(last) if last.scaled == n => last.count += 1,
            _ => out.push(Group {
                scaled: n,
                count: 1,
            }),
        }
    }
    Ok((out, den))
}

/// Best value of `sum m_i R_i` at degree `d` and a tuple attaining it.
///
/// Among optimal allocations the one giving the fewest units to the largest
/// balls is returned, group by group from the largest size down.
pub fn per_degree_max(d: u32, c: &BallConfig) -> Result<(Rational, ObstructionTuple)> {
    if d == 0 {
        return Err(Error::Precondition("degree must be at least 1".into()));
    }
    let (groups, den) = groups(c)?;
    let d64 = d as u64;
    let budget = d64 * d64 + 3 * d64;
    let width = budget as usize + 1;

    // Groups are stored largest first; fill the table smallest first.
    let mut dp = vec![0i128; width];
    let mut choices: Vec<Vec<u32>> = Vec::with_capacity(groups.len());
    for grp in groups.iter().rev() {
        let options: Vec<(usize, u64)> = (0..=grp.count * d64)
            .map(|s| (group_cost(grp.count, s), s))
            .take_while(|&(cost, _)| cost <= budget)
            .map(|(cost, s)| (cost as usize, s))
            .collect();
        let mut next = vec![0i128; width];
        let mut choice = vec![0u32; width];
        for b in 0..width {
            let mut best = i128::MIN;
            let mut arg = 0u64;
            for &(cost, s) in &options {
                if cost > b {
                    break;
                }
                let v = (s as i128)
                    .checked_mul(grp.scaled)
                    .and_then(|x| x.checked_add(dp[b - cost]))
                    .ok_or_else(|| Error::Overflow("dynamic programming value".into()))?;
                if v > best {
                    best = v;
                    arg = s;
                }
            }
            next[b] = best;
            choice[b] = arg as u32;
        }
        dp = next;
        choices.push(choice);
    }

    let mut b = budget as usize;
    let mut m = Vec::new();
    for (grp, choice) in groups.iter().zip(choices.iter().rev()) {
        let s = choice[b] as u64;
        b -= group_cost(grp.count, s) as usize;
        m.extend(balanced(grp.count, s));
    }
    let value = Rational::new(BigInt::from(dp[width - 1]), den);
    Ok((value, ObstructionTuple::new(d as i64, m)))
}

/// `sum m_i R_i` with both sequences sorted nonincreasing.
pub fn tuple_value(t: &ObstructionTuple, c: &BallConfig) -> Rational {
    let mut m = t.m.clone();
    m.sort_unstable_by(|a, b| b.cmp(a));
    m.iter()
        .zip(c.sizes())
        .fold(Rational::zero(), |acc, (&mi, r)| {
            acc + r * Rational::from_integer(mi.into())
        })
}

/// `sum m_i R_i / d`.
pub fn tuple_ratio(t: &ObstructionTuple, c: &BallConfig) -> Rational {
    tuple_value(t, c) / Rational::from_integer(t.d.into())
}
