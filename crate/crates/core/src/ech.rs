//! ECH capacity sequences of balls, ellipsoids and rational toric domains.
//!
//! All prefixes are computed on integers after clearing denominators.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive, Zero};
use parking_lot::RwLock;

use crate::error::{Error, Result};
use crate::scalar::{common_denominator, Rational};
use crate::toric::{negative_weight_sequence, weight_sequence, ConcaveDomain, ConvexDomain};

fn overflow() -> Error {
    Error::Overflow("scaled capacity value".into())
}

/// Common denominator and the values scaled by it.
fn scaled(values: &[Rational]) -> Result<(Vec<i128>, BigInt)> {
    let den = common_denominator(values);
    let out = values
        .iter()
        .map(|v| {
            (v * Rational::from_integer(den.clone()))
                .to_integer()
                .to_i128()
                .filter(|x| x.abs() < 1i128 << 40)
                .ok_or_else(overflow)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((out, den))
}

fn unscale(v: i128, den: &BigInt) -> Rational {
    Rational::new(BigInt::from(v), den.clone())
}

/// Largest `d` with `d(d+1)/2 <= k`.
fn ball_level(k: u64) -> i128 {
    let r = (8 * k as u128 + 1).sqrt();
    ((r - 1) / 2) as i128
}

fn ceil_sqrt_u128(n: u128) -> u128 {
    let r = n.sqrt();
    if r * r < n {
        r + 1
    } else {
        r
    }
}

pub fn ech_ball(a: &Rational, k: u64) -> Rational {
    a * Rational::from_integer(ball_level(k).into())
}

pub fn ech_ball_prefix(a: &Rational, k_max: usize) -> Vec<Rational> {
    (0..=k_max as u64).map(|k| ech_ball(a, k)).collect()
}

/// `c_0..=c_{k_max}` of `E(a, b)`: the sorted values `ma + nb` with multiplicity.
pub fn ech_ellipsoid_prefix(a: &Rational, b: &Rational, k_max: usize) -> Result<Vec<Rational>> {
    if !a.is_positive() || !b.is_positive() {
        return Err(Error::Domain(
            "ellipsoid parameters must be positive".into(),
        ));
    }
    let (s, den) = scaled(&[a.clone(), b.clone()])?;
    // The k+1 smallest values all have m + n <= k.
    let mut vals = Vec::with_capacity((k_max + 1) * (k_max + 2) / 2);
    for m in 0..=k_max as i128 {
        for n in 0..=(k_max as i128 - m) {
            vals.push(m * s[0] + n * s[1]);
        }
    }
    vals.sort_unstable();
    Ok(vals[..=k_max].iter().map(|&v| unscale(v, &den)).collect())
}

pub fn ech_ellipsoid(a: &Rational, b: &Rational, k: usize) -> Result<Rational> {
    Ok(ech_ellipsoid_prefix(a, b, k)?.pop().expect("nonempty"))
}

/// Max-plus convolution `(A + B)_k = max_{i+j=k} A_i + B_j`, truncated to the shorter input.
pub fn max_plus(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| (0..=k).map(|i| &a[i] + &b[k - i]).max().expect("nonempty"))
        .collect()
}

pub fn ech_union(a: &CapacitySequence, b: &CapacitySequence, k: usize) -> Result<Rational> {
    let pa = a.prefix(k)?;
    let pb = b.prefix(k)?;
    Ok(max_plus(&pa, &pb).pop().expect("nonempty"))
}

/// Ceiling on inner-loop steps spent tabulating a union of balls.
pub const MAX_UNION_WORK: u128 = 3_000_000_000;

/// `(cost, total)` pairs for `g` equal balls sharing `total` levels as evenly as possible.
fn group_options(g: usize, len: usize) -> Vec<(usize, i128)> {
    let tri = |d: usize| d * (d + 1) / 2;
    let mut out = Vec::new();
    for total in 0.. {
        let (q, r) = (total / g, total % g);
        let cost = r * tri(q + 1) + (g - r) * tri(q);
        if cost > len {
            break;
        }
        out.push((cost, total as i128));
    }
    out
}

/// Prefix of the disjoint union of balls with scaled sizes.
fn union_scaled(weights: &[i128], len: usize) -> Result<Vec<i128>> {
    let mut groups: Vec<(i128, usize)> = Vec::new();
    for &w in weights {
        match groups.iter_mut().find(|(x, _)| *x == w) {
            Some(grp) => grp.1 += 1,
            None => groups.push((w, 1)),
        }
    }
    groups.sort_by(|a, b| b.1.cmp(&a.1));
    let options: Vec<Vec<(usize, i128)>> =
        groups.iter().map(|&(_, g)| group_options(g, len)).collect();
    let work: u128 = options
        .iter()
        .skip(1)
        .map(|o| o.len() as u128 * (len as u128 + 1))
        .sum();
    if work > MAX_UNION_WORK {
        return Err(Error::Budget {
            bound: "union_work",
            value: MAX_UNION_WORK as u64,
            detail: format!("union of {} balls up to index {len}", weights.len()),
        });
    }
    let mut dp = vec![0i128; len + 1];
    for (gi, (&(w, _), opts)) in groups.iter().zip(&options).enumerate() {
        if gi == 0 {
            let mut idx = 0;
            for (j, slot) in dp.iter_mut().enumerate() {
                while idx + 1 < opts.len() && opts[idx + 1].0 <= j {
                    idx += 1;
                }
                *slot = w.checked_mul(opts[idx].1).ok_or_else(overflow)?;
            }
            continue;
        }
        let mut next = dp.clone();
        for (j, slot) in next.iter_mut().enumerate() {
            for &(cost, total) in opts.iter().skip(1) {
                if cost > j {
                    break;
                }
                let v = w
                    .checked_mul(total)
                    .and_then(|x| x.checked_add(dp[j - cost]))
                    .ok_or_else(overflow)?;
                if v > *slot {
                    *slot = v;
                }
            }
        }
        dp = next;
    }
    Ok(dp)
}

/// Prefix of a disjoint union of balls of the given sizes.
pub fn ech_balls_prefix(sizes: &[Rational], k_max: usize) -> Result<Vec<Rational>> {
    if sizes.is_empty() {
        return Ok(vec![Rational::zero(); k_max + 1]);
    }
    let (s, den) = scaled(sizes)?;
    Ok(union_scaled(&s, k_max)?
        .into_iter()
        .map(|v| unscale(v, &den))
        .collect())
}

pub fn ech_concave_prefix(omega: &ConcaveDomain, k_max: usize) -> Result<Vec<Rational>> {
    ech_balls_prefix(&weight_sequence(omega)?.weights, k_max)
}

pub fn ech_concave(omega: &ConcaveDomain, k: usize) -> Result<Rational> {
    Ok(ech_concave_prefix(omega, k)?.pop().expect("nonempty"))
}

/// Largest shift range [`ech_convex_prefix`] will tabulate.
pub const MAX_J_BUDGET: usize = 4_000_000;

/// Shift range guaranteed to certify every index up to `k_max`.
pub fn default_j_budget(omega: &ConvexDomain, k_max: usize) -> Result<usize> {
    let table = ConvexTable::new(omega, 0)?;
    (0..=k_max).try_fold(0usize, |acc, k| Ok(acc.max(table.needed(k)?)))
}

/// Head, negative weights and their union prefix, all scaled to integers.
struct ConvexTable {
    head: i128,
    wsq: i128,
    wsum: i128,
    count: i128,
    union: Vec<i128>,
    den: BigInt,
}

impl ConvexTable {
    fn new(omega: &ConvexDomain, len: usize) -> Result<Self> {
        let neg = negative_weight_sequence(omega)?;
        let mut all = vec![neg.head.clone().expect("head")];
        all.extend(neg.weights.iter().cloned());
        let (s, den) = scaled(&all)?;
        let w = &s[1..];
        Ok(ConvexTable {
            head: s[0],
            wsq: w.iter().map(|x| x * x).sum(),
            wsum: w.iter().sum(),
            count: w.len() as i128,
            union: union_scaled(w, len)?,
            den,
        })
    }

    fn ball(&self, n: usize) -> i128 {
        self.head * ball_level(n as u64)
    }

    /// Shift beyond which the real lower bound behind [`Self::floor2`] increases.
    fn turning_point(&self, k: usize) -> usize {
        let gap = self.head * self.head - self.wsq;
        let num = self.wsq * (8 * k as i128 + 1) - self.head * self.head * self.count;
        if num <= 0 {
            0
        } else {
            ((num + 8 * gap - 1) / (8 * gap)) as usize
        }
    }

    /// Twice a lower bound for `ball(k + j) - union(j)`, valid for every shift.
    ///
    /// `ball(n) >= b (sqrt(8n+1) - 3) / 2` and, relaxing the union to reals,
    /// `union(j) <= (sqrt(W (8j + N)) - sum w) / 2`.
    fn floor2(&self, k: usize, j: usize) -> i128 {
        let root = (8 * (k + j) as u128 + 1).sqrt() as i128;
        let cs = ceil_sqrt_u128(self.wsq as u128 * (8 * j as u128 + self.count as u128)) as i128;
        self.head * (root - 3) - cs + self.wsum
    }

    /// A shift range that certifies index `k`.
    fn needed(&self, k: usize) -> Result<usize> {
        if self.wsq == 0 {
            return Ok(0);
        }
        let target = 2 * self.ball(k);
        let j0 = self.turning_point(k);
        let mut hi = j0.max(1);
        while self.floor2(k, hi) < target {
            hi *= 2;
            if hi > MAX_J_BUDGET {
                return Err(Error::Budget {
                    bound: "j_budget",
                    value: MAX_J_BUDGET as u64,
                    detail: format!("shift range needed at index {k}"),
                });
            }
        }
        let mut lo = j0;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.floor2(k, mid) >= target {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(hi)
    }

    /// Exact `c_k`, or the best bound found when the shift range is too short.
    fn value(&self, k: usize, j_budget: usize) -> std::result::Result<i128, i128> {
        if self.wsq == 0 {
            return Ok(self.ball(k));
        }
        let j0 = self.turning_point(k);
        let mut best = i128::MAX;
        for j in 0..=j_budget.min(self.union.len() - 1) {
            best = best.min(self.ball(k + j) - self.union[j]);
            if j >= j0 && self.floor2(k, j) >= 2 * best {
                return Ok(best);
            }
        }
        Err(best)
    }
}

/// `c_0..=c_{k_max}` of a convex domain, each certified within `j_budget` shifts
/// (or [`default_j_budget`] when `None`).
pub fn ech_convex_prefix(
    omega: &ConvexDomain,
    k_max: usize,
    j_budget: Option<usize>,
) -> Result<Vec<Rational>> {
    let jb = match j_budget {
        Some(j) => j,
        None => default_j_budget(omega, k_max)?,
    };
    let table = ConvexTable::new(omega, jb)?;
    (0..=k_max)
        .map(|k| match table.value(k, jb) {
            Ok(v) => Ok(unscale(v, &table.den)),
            Err(best) => Err(Error::Uncertified {
                k,
                j_budget: jb,
                best: crate::scalar::format_rational(&unscale(best, &table.den)),
            }),
        })
        .collect()
}

pub fn ech_convex(omega: &ConvexDomain, k: usize, j_budget: Option<usize>) -> Result<Rational> {
    Ok(ech_convex_prefix(omega, k, j_budget)?
        .pop()
        .expect("nonempty"))
}

/// Index of the first `k <= k_max` with `c_k(omega1) > c_k(omega2)`.
pub fn first_violation(
    omega1: &ConcaveDomain,
    omega2: &ConvexDomain,
    k_max: usize,
) -> Result<Option<usize>> {
    let a = ech_concave_prefix(omega1, k_max)?;
    let b = ech_convex_prefix(omega2, k_max, None)?;
    Ok(a.iter().zip(&b).position(|(x, y)| x > y))
}

/// `c_k(omega1) <= c_k(omega2)` for every `k <= k_max`.
pub fn ech_dominates(omega1: &ConcaveDomain, omega2: &ConvexDomain, k_max: usize) -> Result<bool> {
    Ok(first_violation(omega1, omega2, k_max)?.is_none())
}

#[derive(Clone, Debug)]
pub enum SequenceSource {
    Zero,
    Ball(Rational),
    Ellipsoid(Rational, Rational),
    Concave(ConcaveDomain),
    Convex(ConvexDomain),
    Union(Vec<Arc<CapacitySequence>>),
    Explicit(Vec<Rational>),
}

/// A capacity sequence evaluated on demand; computed prefixes are cached.
#[derive(Debug)]
pub struct CapacitySequence {
    source: SequenceSource,
    cache: RwLock<Vec<Rational>>,
}

impl CapacitySequence {
    pub fn new(source: SequenceSource) -> Self {
        CapacitySequence {
            source,
            cache: RwLock::new(Vec::new()),
        }
    }

    pub fn source(&self) -> &SequenceSource {
        &self.source
    }

    pub fn get(&self, k: usize) -> Result<Rational> {
        Ok(self.prefix(k)?.pop().expect("nonempty"))
    }

    /// `c_0..=c_{k_max}`.
    pub fn prefix(&self, k_max: usize) -> Result<Vec<Rational>> {
        {
            let cache = self.cache.read();
            if cache.len() > k_max {
                return Ok(cache[..=k_max].to_vec());
            }
        }
        let mut cache = self.cache.write();
        if cache.len() <= k_max {
            let target = k_max.max(2 * cache.len());
            *cache = self.compute(target).or_else(|_| self.compute(k_max))?;
        }
        Ok(cache[..=k_max].to_vec())
    }

    fn compute(&self, k_max: usize) -> Result<Vec<Rational>> {
        match &self.source {
            SequenceSource::Zero => Ok(vec![Rational::zero(); k_max + 1]),
            SequenceSource::Ball(a) => Ok(ech_ball_prefix(a, k_max)),
            SequenceSource::Ellipsoid(a, b) => ech_ellipsoid_prefix(a, b, k_max),
            SequenceSource::Concave(d) => ech_concave_prefix(d, k_max),
            SequenceSource::Convex(d) => ech_convex_prefix(d, k_max, None),
            SequenceSource::Union(parts) => parts
                .iter()
                .try_fold(vec![Rational::zero(); k_max + 1], |acc, p| {
                    Ok(max_plus(&acc, &p.prefix(k_max)?))
                }),
            SequenceSource::Explicit(v) => {
                if v.len() > k_max {
                    Ok(v[..=k_max].to_vec())
                } else {
                    Err(Error::Precondition(format!(
                        "explicit sequence has only {} terms",
                        v.len()
                    )))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, parse_rational, ratio};
    use proptest::prelude::*;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    /// Polydisk capacities: min { am + bn : (m+1)(n+1) >= k+1 }.
    fn polydisk_oracle(a: &Rational, b: &Rational, k: i64) -> Rational {
        let mut best: Option<Rational> = None;
        for m in 0..=k {
            let n = ((k + 1) + m) / (m + 1) - 1;
            let v = a * int(m) + b * int(n);
            if best.as_ref().is_none_or(|x| v < *x) {
                best = Some(v);
            }
        }
        best.unwrap()
    }

    /// Shift minimization over a fixed range, straight from rationals.
    fn shift_oracle(omega: &ConvexDomain, k: usize, range: usize) -> Rational {
        let neg = negative_weight_sequence(omega).unwrap();
        let head = neg.head.unwrap();
        let u = ech_balls_prefix(&neg.weights, range).unwrap();
        (0..=range)
            .map(|j| ech_ball(&head, (k + j) as u64) - &u[j])
            .min()
            .unwrap()
    }

    #[test]
    fn ball_examples() {
        assert_eq!(ech_ball(&int(1), 0), int(0));
        assert_eq!(ech_ball(&int(1), 3), int(2));
        assert_eq!(ech_ball(&int(2), 6), int(6));
        // brute force over m + n
        let mut all: Vec<i64> = (0..20).flat_map(|m| (0..20).map(move |n| m + n)).collect();
        all.sort();
        for k in 0..100 {
            assert_eq!(ech_ball(&int(1), k), int(all[k as usize]));
        }
    }

    #[test]
    fn ellipsoid_examples() {
        assert_eq!(ech_ellipsoid(&int(1), &int(2), 4).unwrap(), int(3));
        assert_eq!(ech_ellipsoid(&int(1), &int(1), 2).unwrap(), int(1));
        assert_eq!(ech_ellipsoid(&int(1), &int(5), 1).unwrap(), int(1));
    }

    #[test]
    fn union_examples() {
        let ball = || CapacitySequence::new(SequenceSource::Ball(int(1)));
        assert_eq!(ech_union(&ball(), &ball(), 2).unwrap(), int(2));
        assert_eq!(ech_union(&ball(), &ball(), 4).unwrap(), int(3));
        let zero = CapacitySequence::new(SequenceSource::Zero);
        let e = CapacitySequence::new(SequenceSource::Ellipsoid(int(1), ratio(7, 3)));
        for k in 0..20 {
            assert_eq!(ech_union(&e, &zero, k).unwrap(), e.get(k).unwrap());
        }
        let pair = ech_balls_prefix(&[int(1), int(1)], 4).unwrap();
        assert_eq!(pair, ints(&[0, 1, 2, 2, 3]));
    }

    #[test]
    fn concave_examples() {
        let t = |a: &str, b: &str| ConcaveDomain::triangle(r(a), r(b)).unwrap();
        assert_eq!(ech_concave(&t("1", "2"), 3).unwrap(), int(2));
        assert_eq!(ech_concave(&t("1", "1"), 1).unwrap(), int(1));
        assert_eq!(ech_concave(&t("1", "3"), 5).unwrap(), int(4));
        assert_eq!(ech_ellipsoid(&int(1), &int(3), 5).unwrap(), int(4));
    }

    #[test]
    fn convex_examples() {
        let b1 = ConvexDomain::ball(int(1)).unwrap();
        assert_eq!(
            ech_convex_prefix(&b1, 30, None).unwrap(),
            ech_ball_prefix(&int(1), 30)
        );
        let sq = ConvexDomain::polydisk(int(1), int(1)).unwrap();
        let p = ech_convex_prefix(&sq, 5, None).unwrap();
        assert_eq!(p, ints(&[0, 1, 2, 2, 3, 3]));
        let e12 = ConvexDomain::triangle(int(1), int(2)).unwrap();
        assert_eq!(ech_convex(&e12, 4, None).unwrap(), int(3));
    }

    #[test]
    fn polydisk_matches_oracles() {
        for (a, b) in [("1", "1"), ("1", "2"), ("2", "3"), ("1/2", "5/3")] {
            let d = ConvexDomain::polydisk(r(a), r(b)).unwrap();
            let p = ech_convex_prefix(&d, 60, None).unwrap();
            for (k, v) in p.iter().enumerate() {
                assert_eq!(
                    *v,
                    polydisk_oracle(&r(a), &r(b), k as i64),
                    "P({a},{b}) k={k}"
                );
                if k <= 20 {
                    assert_eq!(*v, shift_oracle(&d, k, 400), "P({a},{b}) k={k}");
                }
            }
        }
    }

    #[test]
    fn short_budget_is_an_error() {
        let d = ConvexDomain::polydisk(int(1), ratio(1, 7)).unwrap();
        match ech_convex(&d, 40, Some(1)) {
            Err(Error::Uncertified { j_budget, .. }) => assert_eq!(j_budget, 1),
            other => panic!("expected an uncertified error, got {other:?}"),
        }
    }

    #[test]
    fn grouped_union_matches_pairwise_convolution() {
        let sizes = [
            int(1),
            int(1),
            int(1),
            ratio(1, 2),
            ratio(1, 2),
            ratio(1, 3),
        ];
        let direct = ech_balls_prefix(&sizes, 80).unwrap();
        let folded = sizes.iter().fold(vec![Rational::zero(); 81], |acc, w| {
            max_plus(&acc, &ech_ball_prefix(w, 80))
        });
        assert_eq!(direct, folded);
    }

    #[test]
    fn thin_domains_fail_fast() {
        let d = ConvexDomain::triangle(ratio(1, 50), int(40)).unwrap();
        assert!(matches!(
            ech_convex(&d, 300, None),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn dominance_examples() {
        let e12 = ConcaveDomain::triangle(int(1), int(2)).unwrap();
        assert!(ech_dominates(&e12, &ConvexDomain::ball(int(2)).unwrap(), 50).unwrap());
        let b = ConvexDomain::ball(ratio(19, 10)).unwrap();
        assert!(!ech_dominates(&e12, &b, 50).unwrap());
        assert_eq!(first_violation(&e12, &b, 50).unwrap(), Some(2));
    }

    #[test]
    fn sequence_cache_extends() {
        let s = CapacitySequence::new(SequenceSource::Ellipsoid(int(1), int(3)));
        let short = s.prefix(5).unwrap();
        let long = s.prefix(40).unwrap();
        assert_eq!(&long[..=5], &short[..]);
        let explicit = CapacitySequence::new(SequenceSource::Explicit(ints(&[0, 1])));
        assert!(explicit.get(3).is_err());
    }

    fn small() -> impl Strategy<Value = Rational> {
        (1i64..30, 1i64..11).prop_map(|(n, d)| ratio(n, d))
    }

    /// Sides within a factor of eight of each other.
    fn sides() -> impl Strategy<Value = (Rational, Rational)> {
        (small(), 1i64..9, 1i64..9).prop_map(|(a, n, d)| (a.clone(), a * ratio(n, d)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn three_routes_agree((a, b) in sides()) {
            let k = 60;
            let e = ech_ellipsoid_prefix(&a, &b, k).unwrap();
            let c = ech_concave_prefix(&ConcaveDomain::triangle(a.clone(), b.clone()).unwrap(), k).unwrap();
            let x = ech_convex_prefix(&ConvexDomain::triangle(a, b).unwrap(), k, None).unwrap();
            prop_assert_eq!(&e, &c);
            prop_assert_eq!(&e, &x);
        }

        #[test]
        fn sequences_nondecreasing_and_scale((a, b) in sides(), lam in small()) {
            let d = ConvexDomain::polydisk(a, b).unwrap();
            let p = ech_convex_prefix(&d, 40, None).unwrap();
            prop_assert!(p[0].is_zero());
            prop_assert!(p.windows(2).all(|w| w[0] <= w[1]));
            let q = ech_convex_prefix(&d.scale(&lam), 40, None).unwrap();
            let scaled: Vec<Rational> = p.iter().map(|v| v * &lam).collect();
            prop_assert_eq!(q, scaled);
        }

        #[test]
        fn inclusion_monotone((a, b) in sides(), da in small(), db in small()) {
            let inner = ConvexDomain::polydisk(a.clone(), b.clone()).unwrap();
            let outer = ConvexDomain::polydisk(a + da, b + db).unwrap();
            let p = ech_convex_prefix(&inner, 40, None).unwrap();
            let q = ech_convex_prefix(&outer, 40, None).unwrap();
            prop_assert!(p.iter().zip(&q).all(|(x, y)| x <= y));
        }
    }
}
