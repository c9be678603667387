//! Tail certificates: proofs that no tuple of degree above the searched range
//! has ratio exceeding a candidate capacity.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{ceil_sqrt, ceil_to_bigint, int, sqrt_bounds, QuadraticValue, Rational};

use super::BallConfig;

const BITS: u32 = 64;
const MAX_SCAN: u64 = 200_000;

/// Invariants of the candidate `mu` relative to the configuration.
struct Shape {
    k: Rational,
    /// `mu^2 / V - 1`
    alpha: Rational,
    /// enclosure of `mu * S / V`
    c_lo: Rational,
    c_hi: Rational,
    /// `(k - S^2 / V) / 4`
    gamma: Rational,
}

fn shape(c: &BallConfig, mu: &QuadraticValue) -> Shape {
    let v = c.volume();
    let s = c.sum();
    let k = int(c.len() as i64);
    let alpha = mu.square() / &v - Rational::one();
    let (mu_lo, mu_hi) = mu.bounds(BITS);
    let gamma = (&k - &s * &s / &v) / int(4);
    Shape {
        c_lo: &mu_lo * &s / &v,
        c_hi: &mu_hi * &s / &v,
        k,
        alpha,
        gamma,
    }
}

/// Upper bound for the ratio of any tuple of degree above `searched`.
pub(super) fn tail_upper(c: &BallConfig, searched: u32) -> QuadraticValue {
    let sum = QuadraticValue::rational(c.sum());
    if c.len() == 1 {
        return sum;
    }
    let v = c.volume();
    let rmax = &c.sizes()[0];
    let (q, _) = sqrt_bounds(&(&v / (rmax * rmax)), BITS);
    let slack = int(3) - q;
    let bound = if slack.is_positive() {
        let sq = &v * (Rational::one() + slack / int(searched as i64 + 1));
        QuadraticValue::sqrt(sq).expect("positive radicand")
    } else {
        c.volume_bound()
    };
    bound.min(sum)
}

/// True when no nonnegative tuple of degree above `searched` satisfying the
/// packing constraint has ratio above `mu`. Requires `mu >= sqrt(V)`.
pub(super) fn full_tuples_certified(c: &BallConfig, mu: &QuadraticValue, searched: u32) -> bool {
    let sh = shape(c, mu);
    // A violating tuple at degree d forces h(d) > 0 where
    // h(d) = -alpha d^2 + (3 - c) d + gamma.
    let beta_hi = int(3) - &sh.c_lo;
    let d = int(searched as i64 + 1);
    let h = -&sh.alpha * &d * &d + &beta_hi * &d + &sh.gamma;
    let falling = int(2) * &sh.alpha * &d >= beta_hi;
    !h.is_positive() && falling
}

/// True when no exceptional class of degree above `searched` with at most
/// `k` entries has ratio above `mu`. Requires `mu >= sqrt(V)`.
pub(super) fn exceptional_certified(c: &BallConfig, mu: &QuadraticValue, searched: u32) -> bool {
    let sh = shape(c, mu);
    let start = searched as u64 + 1;
    let mut end: Option<BigInt> = None;
    if sh.alpha.is_positive() {
        end = Some(ceil_sqrt(&(Rational::one() / &sh.alpha)));
    }
    let three = int(3);
    let delta = if sh.c_hi < three {
        Some(&three - &sh.c_hi)
    } else if sh.c_lo > three {
        Some(&sh.c_lo - &three)
    } else {
        None
    };
    if let Some(delta) = delta {
        let (_, rk) = sqrt_bounds(&sh.k, BITS);
        let d_ii = ceil_to_bigint(&((Rational::one() + rk) / delta));
        end = Some(match end {
            Some(e) if e < d_ii => e,
            _ => d_ii,
        });
    }
    let Some(end) = end else { return false };
    let Some(end) = end.to_u64() else {
        return false;
    };
    if end <= start {
        return true;
    }
    if end - start > MAX_SCAN {
        return false;
    }
    (start..end).all(|d| degree_excluded(&sh, d))
}

fn degree_excluded(sh: &Shape, d: u64) -> bool {
    let d = int(d as i64);
    let room = Rational::one() - &sh.alpha * &d * &d;
    if !room.is_positive() {
        return true;
    }
    // sum of deviations lies in [(3 - c_hi) d - 1, (3 - c_lo) d - 1]
    let lo = (int(3) - &sh.c_hi) * &d - Rational::one();
    let hi = (int(3) - &sh.c_lo) * &d - Rational::one();
    let gap = if lo.is_positive() {
        lo
    } else if hi.is_negative() {
        -hi
    } else {
        Rational::zero()
    };
    &gap * &gap >= &sh.k * room
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn equal(k: usize) -> BallConfig {
        BallConfig::new(vec![int(1); k]).unwrap()
    }

    fn first_certified(f: impl Fn(u32) -> bool) -> u32 {
        (1..1000).find(|&d| f(d)).unwrap()
    }

    #[test]
    fn seven_balls() {
        let c = equal(7);
        let mu = QuadraticValue::rational(ratio(8, 3));
        assert_eq!(first_certified(|d| full_tuples_certified(&c, &mu, d)), 20);
        assert!(first_certified(|d| exceptional_certified(&c, &mu, d)) <= 7);
    }

    #[test]
    fn volume_dominated_configs_certify_immediately() {
        let c = equal(9);
        assert!(full_tuples_certified(&c, &c.volume_bound(), 1));
        assert_eq!(tail_upper(&c, 1), QuadraticValue::rational(int(3)));
        let c = equal(10);
        assert!(full_tuples_certified(&c, &c.volume_bound(), 1));
    }

    #[test]
    fn single_ball_tail_is_exact() {
        let c = BallConfig::new(vec![ratio(3, 2)]).unwrap();
        assert_eq!(tail_upper(&c, 1), QuadraticValue::rational(ratio(3, 2)));
    }

    #[test]
    fn tail_bound_dominates_later_degrees() {
        let c = BallConfig::new(vec![int(2), int(1), ratio(1, 2)]).unwrap();
        for searched in 1..8u32 {
            let u = tail_upper(&c, searched);
            for d in searched + 1..searched + 10 {
                let (v, _) = super::super::per_degree_max(d, &c).unwrap();
                let r = v / int(d as i64);
                assert!(u.cmp_rational(&r).is_ge(), "d={d}");
            }
        }
    }
}
