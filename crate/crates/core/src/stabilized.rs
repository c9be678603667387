//! Embedding problems crossed with a closed surface or an aspherical manifold,
//! answered by reduction to the four-dimensional engines.

use num_traits::{One, Signed};
use serde::Serialize;

use crate::ech::ech_dominates;
use crate::error::{Error, Result};
use crate::packing::{
    decide_packing_with, BallConfig, Convention, Decision, Engine, DEFAULT_DEGREE_BUDGET,
};
use crate::scalar::Rational;
use crate::toric::{decide_concave_into_convex_with, ConcaveDomain, ConvexDomain};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fiber {
    Surface {
        genus: u32,
        area: Rational,
    },
    /// User-asserted aspherical manifold.
    Aspherical {
        tag: String,
        aspherical: bool,
    },
}

impl Fiber {
    pub fn surface(genus: u32, area: Rational) -> Result<Self> {
        check_area(&area)?;
        Ok(Fiber::Surface { genus, area })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilizedBase {
    Packing {
        sizes: BallConfig,
        target: Rational,
    },
    TwoBall {
        n: u32,
        r1: Rational,
        r2: Rational,
        target: Rational,
    },
    Toric {
        source: ConcaveDomain,
        target: ConvexDomain,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizedProblem {
    pub base: StabilizedBase,
    pub fiber: Fiber,
}

pub const BASIS_PACKING: &str = "Theorem A";
pub const BASIS_TWO_BALL: &str = "Theorem B";
pub const BASIS_TORIC: &str = "Theorem D";
pub const BASIS_GENUS_ZERO: &str = "Section 4.2";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizedDecision {
    pub decision: Decision,
    pub basis: &'static str,
    pub fiber_independent: bool,
    /// Finite-prefix ECH comparison, toric problems only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ech_dominates: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ech_k_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ech_error: Option<String>,
}

fn check_area(area: &Rational) -> Result<()> {
    if !area.is_positive() {
        return Err(Error::Domain(format!(
            "fiber area must be positive, got {area}"
        )));
    }
    Ok(())
}

pub fn decide_stabilized_packing(
    sizes: &BallConfig,
    target: &Rational,
    genus: u32,
    area: &Rational,
    convention: Convention,
) -> Result<StabilizedDecision> {
    decide_stabilized_packing_with(
        sizes,
        target,
        genus,
        area,
        convention,
        DEFAULT_DEGREE_BUDGET,
        Engine::Combined,
    )
}

pub fn decide_stabilized_packing_with(
    sizes: &BallConfig,
    target: &Rational,
    genus: u32,
    area: &Rational,
    convention: Convention,
    d_budget: u32,
    engine: Engine,
) -> Result<StabilizedDecision> {
    check_area(area)?;
    let decision = decide_packing_with(sizes, target, convention, d_budget, engine)?;
    Ok(StabilizedDecision {
        decision,
        basis: if genus == 0 {
            BASIS_GENUS_ZERO
        } else {
            BASIS_PACKING
        },
        fiber_independent: true,
        ech_dominates: None,
        ech_k_max: None,
        ech_error: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoBallDecision {
    No,
    Yes,
    ConjecturallyYes,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoBallReport {
    pub decision: TwoBallDecision,
    pub basis: &'static str,
    pub fiber_independent: bool,
}

/// Two balls of sizes `r1`, `r2` into a ball of size `target`, all in `2n`
/// dimensions and crossed with an aspherical manifold.
pub fn decide_stabilized_two_ball(
    n: u32,
    r1: &Rational,
    r2: &Rational,
    target: &Rational,
    aspherical: bool,
) -> Result<TwoBallReport> {
    if !aspherical {
        return Err(Error::Hypothesis(
            "the fiber must be symplectically aspherical: its symplectic form vanishes on pi_2(M)"
                .into(),
        ));
    }
    if n < 2 {
        return Err(Error::Domain(format!("n must be at least 2, got {n}")));
    }
    if !r1.is_positive() || !r2.is_positive() || !target.is_positive() {
        return Err(Error::Domain("sizes must be positive".into()));
    }
    let decision = if r1 + r2 >= *target {
        TwoBallDecision::No
    } else if n == 2 || r1 == r2 {
        TwoBallDecision::Yes
    } else {
        TwoBallDecision::ConjecturallyYes
    };
    Ok(TwoBallReport {
        decision,
        basis: BASIS_TWO_BALL,
        fiber_independent: true,
    })
}

/// Default prefix length for the ECH cross-check.
pub const DEFAULT_ECH_K_MAX: usize = 50;

pub fn decide_stabilized_toric(
    source: &ConcaveDomain,
    target: &ConvexDomain,
    genus: u32,
    area: &Rational,
    convention: Convention,
    ech_k_max: usize,
) -> Result<StabilizedDecision> {
    decide_stabilized_toric_with(
        source,
        target,
        genus,
        area,
        convention,
        ech_k_max,
        DEFAULT_DEGREE_BUDGET,
        Engine::Combined,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn decide_stabilized_toric_with(
    source: &ConcaveDomain,
    target: &ConvexDomain,
    _genus: u32,
    area: &Rational,
    convention: Convention,
    ech_k_max: usize,
    d_budget: u32,
    engine: Engine,
) -> Result<StabilizedDecision> {
    check_area(area)?;
    let decision = decide_concave_into_convex_with(source, target, convention, d_budget, engine)?;
    let (dominates, error) = if ech_k_max == 0 {
        (None, None)
    } else {
        match ech_dominates(source, target, ech_k_max) {
            Ok(b) => (Some(b), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    Ok(StabilizedDecision {
        decision,
        basis: BASIS_TORIC,
        fiber_independent: true,
        ech_dominates: dominates,
        ech_k_max: (ech_k_max > 0).then_some(ech_k_max),
        ech_error: error,
    })
}

/// Decides a [`StabilizedProblem`] with default budgets.
pub fn decide(problem: &StabilizedProblem, convention: Convention) -> Result<StabilizedDecision> {
    let (genus, area) = match &problem.fiber {
        Fiber::Surface { genus, area } => (*genus, area.clone()),
        Fiber::Aspherical { .. } => {
            if !matches!(problem.base, StabilizedBase::TwoBall { .. }) {
                return Err(Error::Precondition(
                    "aspherical fibers are supported for two-ball problems only".into(),
                ));
            }
            (1, Rational::one())
        }
    };
    match &problem.base {
        StabilizedBase::Packing { sizes, target } => {
            decide_stabilized_packing(sizes, target, genus, &area, convention)
        }
        StabilizedBase::Toric { source, target } => {
            decide_stabilized_toric(source, target, genus, &area, convention, DEFAULT_ECH_K_MAX)
        }
        StabilizedBase::TwoBall { n, r1, r2, target } => {
            let aspherical = match &problem.fiber {
                Fiber::Aspherical { aspherical, .. } => *aspherical,
                // a surface of positive genus is aspherical, the sphere is not
                Fiber::Surface { genus, .. } => *genus >= 1,
            };
            let r = decide_stabilized_two_ball(*n, r1, r2, target, aspherical)?;
            let decision = match r.decision {
                TwoBallDecision::No => Decision::No,
                TwoBallDecision::Yes => Decision::Yes,
                TwoBallDecision::ConjecturallyYes => Decision::Undecided,
            };
            Ok(StabilizedDecision {
                decision,
                basis: r.basis,
                fiber_independent: true,
                ech_dominates: None,
                ech_k_max: None,
                ech_error: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};
    use crate::staircase::ms_value;

    fn balls(s: &[Rational]) -> BallConfig {
        BallConfig::new(s.to_vec()).unwrap()
    }

    #[test]
    fn packing_examples() {
        let d = decide_stabilized_packing(
            &balls(&[int(1), int(1)]),
            &int(2),
            2,
            &int(1),
            Convention::Open,
        )
        .unwrap();
        assert_eq!((d.decision, d.basis), (Decision::No, BASIS_PACKING));
        let d = decide_stabilized_packing(
            &balls(&[int(1), int(1)]),
            &ratio(5, 2),
            1,
            &int(7),
            Convention::Open,
        )
        .unwrap();
        assert_eq!(d.decision, Decision::Yes);
        let d = decide_stabilized_packing(
            &BallConfig::equal(5),
            &ratio(5, 2),
            3,
            &int(1),
            Convention::Open,
        )
        .unwrap();
        assert_eq!(d.decision, Decision::No);
        let d = decide_stabilized_packing(&balls(&[int(1)]), &int(2), 0, &int(1), Convention::Open)
            .unwrap();
        assert_eq!(d.basis, BASIS_GENUS_ZERO);
        assert!(decide_stabilized_packing(
            &balls(&[int(1)]),
            &int(2),
            1,
            &int(0),
            Convention::Open
        )
        .is_err());
    }

    #[test]
    fn two_ball_examples() {
        let r = |n, a, b, t| {
            decide_stabilized_two_ball(n, &a, &b, &t, true)
                .unwrap()
                .decision
        };
        assert_eq!(r(3, int(1), int(1), int(2)), TwoBallDecision::No);
        assert_eq!(r(2, int(1), ratio(1, 2), ratio(8, 5)), TwoBallDecision::Yes);
        assert_eq!(
            r(4, int(1), ratio(1, 2), ratio(8, 5)),
            TwoBallDecision::ConjecturallyYes
        );
        assert_eq!(r(5, int(1), int(1), ratio(21, 10)), TwoBallDecision::Yes);
        let err = decide_stabilized_two_ball(3, &int(1), &int(1), &int(3), false);
        assert!(matches!(err, Err(Error::Hypothesis(m)) if m.contains("pi_2")));
        let json = serde_json::to_value(
            decide_stabilized_two_ball(4, &int(1), &ratio(1, 2), &int(2), true).unwrap(),
        )
        .unwrap();
        assert_eq!(json["decision"], "conjecturally-yes");
        assert_eq!(json["fiber_independent"], true);
    }

    #[test]
    fn toric_examples() {
        let e12 = ConcaveDomain::triangle(int(1), int(2)).unwrap();
        for (mu, want) in [
            (ratio(19, 10), Decision::No),
            (int(2), Decision::No),
            (ratio(21, 10), Decision::Yes),
        ] {
            let d = decide_stabilized_toric(
                &e12,
                &ConvexDomain::ball(mu.clone()).unwrap(),
                2,
                &int(1),
                Convention::Open,
                20,
            )
            .unwrap();
            assert_eq!(d.decision, want, "mu = {mu}");
            assert_eq!(d.basis, BASIS_TORIC);
        }
        let e11 = ConcaveDomain::triangle(int(1), int(1)).unwrap();
        for g in [0, 1, 4] {
            let d = decide_stabilized_toric(
                &e11,
                &ConvexDomain::ball(int(1)).unwrap(),
                g,
                &int(3),
                Convention::Open,
                10,
            )
            .unwrap();
            assert_eq!(d.decision, Decision::No);
        }
        let e15 = ConcaveDomain::triangle(int(1), int(5)).unwrap();
        let d = decide_stabilized_toric(
            &e15,
            &ConvexDomain::ball(ratio(26, 10)).unwrap(),
            1,
            &int(1),
            Convention::Open,
            30,
        )
        .unwrap();
        assert_eq!((d.decision, d.ech_dominates), (Decision::Yes, Some(true)));
    }

    #[test]
    fn agrees_with_staircase_threshold() {
        for x in [int(1), ratio(3, 2), int(3), ratio(9, 2), int(7)] {
            let f = ms_value(&x, 40).unwrap();
            let f = f.exact_value().expect("certified").clone();
            let src = ConcaveDomain::triangle(int(1), x.clone()).unwrap();
            for mu in [ratio(19, 10), int(2), ratio(5, 2), ratio(27, 10), int(3)] {
                let d = decide_stabilized_toric(
                    &src,
                    &ConvexDomain::ball(mu.clone()).unwrap(),
                    1,
                    &int(1),
                    Convention::Open,
                    0,
                )
                .unwrap();
                let want = if f.cmp_rational(&mu).is_lt() {
                    Decision::Yes
                } else {
                    Decision::No
                };
                assert_eq!(d.decision, want, "x = {x}, mu = {mu}");
            }
        }
    }

    #[test]
    fn fiber_independence() {
        let sizes = balls(&[int(1), ratio(1, 2), ratio(1, 3)]);
        let base = decide_stabilized_packing(&sizes, &ratio(8, 5), 1, &int(1), Convention::Open)
            .unwrap()
            .decision;
        for g in [0, 1, 2, 5] {
            for l in [ratio(1, 3), int(1), int(100)] {
                let d = decide_stabilized_packing(&sizes, &ratio(8, 5), g, &l, Convention::Open)
                    .unwrap();
                assert_eq!(d.decision, base);
                assert!(d.fiber_independent);
            }
        }
    }

    #[test]
    fn problem_dispatch() {
        let p = StabilizedProblem {
            base: StabilizedBase::TwoBall {
                n: 3,
                r1: int(1),
                r2: int(1),
                target: int(3),
            },
            fiber: Fiber::Aspherical {
                tag: "T2".into(),
                aspherical: true,
            },
        };
        assert_eq!(
            decide(&p, Convention::Open).unwrap().decision,
            Decision::Yes
        );
        let p = StabilizedProblem {
            base: StabilizedBase::TwoBall {
                n: 3,
                r1: int(1),
                r2: int(1),
                target: int(3),
            },
            fiber: Fiber::surface(0, int(1)).unwrap(),
        };
        assert!(matches!(
            decide(&p, Convention::Open),
            Err(Error::Hypothesis(_))
        ));
    }
}
