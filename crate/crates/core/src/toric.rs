//! Rational concave and convex toric domains and their weight sequences.
//!
//! A concave domain is the region under the graph of a convex decreasing
//! piecewise linear function; a convex domain is a convex region cornered at
//! the origin. Both are given by the vertex list of the non-axis part of the
//! boundary, running from `(0, b)` to `(a, 0)`.

use num_traits::{Signed, Zero};
use serde::ser::SerializeMap;
use serde::Serialize;

use crate::error::{DomainCode, Error, Result};
use crate::packing::{
    decide_packing_with, BallConfig, Convention, Decision, Engine, DEFAULT_DEGREE_BUDGET,
};
use crate::scalar::{format_rational, int, Rational};

pub type Point = (Rational, Rational);

/// Upper bound on peeling steps before giving up.
pub const MAX_PEELS: usize = 1_000_000;

fn cross(u: &Point, v: &Point) -> Rational {
    &u.0 * &v.1 - &u.1 * &v.0
}

fn edge(p: &Point, q: &Point) -> Point {
    (&q.0 - &p.0, &q.1 - &p.1)
}

/// Drops interior vertices lying on a straight segment.
fn merge_collinear(v: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(v.len());
    for p in v {
        while out.len() >= 2 {
            let n = out.len();
            if cross(&edge(&out[n - 2], &out[n - 1]), &edge(&out[n - 1], &p)).is_zero() {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

fn check_endpoints(v: &[Point]) -> Result<()> {
    let zero = Rational::zero();
    if v.len() < 2 {
        return Err(Error::domain(
            DomainCode::Degenerate,
            "need at least two vertices",
        ));
    }
    let (first, last) = (&v[0], &v[v.len() - 1]);
    if first.1 == zero && last.0 == zero {
        return Err(Error::domain(
            DomainCode::Orientation,
            "vertices must run from the y-axis to the x-axis",
        ));
    }
    if first.0 != zero || !first.1.is_positive() {
        return Err(Error::domain(
            DomainCode::Endpoints,
            "first vertex must be (0, b) with b > 0",
        ));
    }
    if last.1 != zero || !last.0.is_positive() {
        return Err(Error::domain(
            DomainCode::Endpoints,
            "last vertex must be (a, 0) with a > 0",
        ));
    }
    Ok(())
}

/// Twice the area enclosed by the axes and the vertex chain.
fn twice_area(v: &[Point]) -> Rational {
    v.windows(2)
        .fold(Rational::zero(), |acc, w| acc + cross(&w[1], &w[0]))
        .abs()
}

/// Region under a convex, strictly decreasing piecewise linear graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConcaveDomain {
    vertices: Vec<Point>,
}

impl ConcaveDomain {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        for w in vertices.windows(2) {
            let e = edge(&w[0], &w[1]);
            if e.0.is_zero() && e.1.is_zero() {
                return Err(Error::domain(DomainCode::Degenerate, "repeated vertex"));
            }
            if e.0.is_negative() || e.1.is_positive() {
                return Err(Error::domain(
                    DomainCode::Orientation,
                    "x must increase and y decrease along the vertices",
                ));
            }
            if e.0.is_zero() || e.1.is_zero() {
                return Err(Error::domain(
                    DomainCode::NonConvex,
                    "concave domains have no horizontal or vertical edges",
                ));
            }
        }
        check_endpoints(&vertices)?;
        for w in vertices.windows(3) {
            if cross(&edge(&w[0], &w[1]), &edge(&w[1], &w[2])).is_negative() {
                return Err(Error::domain(
                    DomainCode::NonConvex,
                    "slopes must be nondecreasing",
                ));
            }
        }
        Ok(ConcaveDomain {
            vertices: merge_collinear(vertices),
        })
    }

    /// Moment triangle of the ellipsoid `E(a, b)`: vertices `(0, b)`, `(a, 0)`.
    pub fn triangle(a: Rational, b: Rational) -> Result<Self> {
        ConcaveDomain::new(vec![(Rational::zero(), b), (a, Rational::zero())])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> Rational {
        twice_area(&self.vertices) / int(2)
    }

    pub fn scale(&self, lambda: &Rational) -> Self {
        assert!(lambda.is_positive());
        ConcaveDomain {
            vertices: self
                .vertices
                .iter()
                .map(|(x, y)| (x * lambda, y * lambda))
                .collect(),
        }
    }

    /// `(a, b)` when the domain is a triangle.
    pub fn as_triangle(&self) -> Option<(Rational, Rational)> {
        (self.vertices.len() == 2).then(|| (self.vertices[1].0.clone(), self.vertices[0].1.clone()))
    }

    pub fn to_convex(&self) -> Option<ConvexDomain> {
        self.as_triangle().map(|_| ConvexDomain {
            vertices: self.vertices.clone(),
        })
    }
}

/// Convex region with a corner at the origin.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConvexDomain {
    vertices: Vec<Point>,
}

impl ConvexDomain {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        for w in vertices.windows(2) {
            let e = edge(&w[0], &w[1]);
            if e.0.is_zero() && e.1.is_zero() {
                return Err(Error::domain(DomainCode::Degenerate, "repeated vertex"));
            }
            if e.0.is_negative() || e.1.is_positive() {
                return Err(Error::domain(
                    DomainCode::Orientation,
                    "x must not decrease and y must not increase along the vertices",
                ));
            }
        }
        check_endpoints(&vertices)?;
        for w in vertices.windows(3) {
            if cross(&edge(&w[0], &w[1]), &edge(&w[1], &w[2])).is_positive() {
                return Err(Error::domain(
                    DomainCode::NonConvex,
                    "boundary must turn clockwise",
                ));
            }
        }
        Ok(ConvexDomain {
            vertices: merge_collinear(vertices),
        })
    }

    pub fn triangle(a: Rational, b: Rational) -> Result<Self> {
        ConvexDomain::new(vec![(Rational::zero(), b), (a, Rational::zero())])
    }

    pub fn ball(a: Rational) -> Result<Self> {
        ConvexDomain::triangle(a.clone(), a)
    }

    /// The rectangle `[0, a] x [0, b]`, moment image of the polydisk `P(a, b)`.
    pub fn polydisk(a: Rational, b: Rational) -> Result<Self> {
        let z = Rational::zero();
        ConvexDomain::new(vec![(z.clone(), b.clone()), (a.clone(), b), (a, z)])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> Rational {
        twice_area(&self.vertices) / int(2)
    }

    pub fn scale(&self, lambda: &Rational) -> Self {
        assert!(lambda.is_positive());
        ConvexDomain {
            vertices: self
                .vertices
                .iter()
                .map(|(x, y)| (x * lambda, y * lambda))
                .collect(),
        }
    }

    pub fn as_triangle(&self) -> Option<(Rational, Rational)> {
        (self.vertices.len() == 2).then(|| (self.vertices[1].0.clone(), self.vertices[0].1.clone()))
    }

    pub fn to_concave(&self) -> Option<ConcaveDomain> {
        self.as_triangle().map(|_| ConcaveDomain {
            vertices: self.vertices.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ToricDomain {
    Concave(ConcaveDomain),
    Convex(ConvexDomain),
}

impl ToricDomain {
    pub fn area(&self) -> Rational {
        match self {
            ToricDomain::Concave(d) => d.area(),
            ToricDomain::Convex(d) => d.area(),
        }
    }

    pub fn vertices(&self) -> &[Point] {
        match self {
            ToricDomain::Concave(d) => d.vertices(),
            ToricDomain::Convex(d) => d.vertices(),
        }
    }

    pub fn as_concave(&self) -> Option<ConcaveDomain> {
        match self {
            ToricDomain::Concave(d) => Some(d.clone()),
            ToricDomain::Convex(d) => d.to_concave(),
        }
    }

    pub fn as_convex(&self) -> Option<ConvexDomain> {
        match self {
            ToricDomain::Convex(d) => Some(d.clone()),
            ToricDomain::Concave(d) => d.to_convex(),
        }
    }
}

impl Serialize for ToricDomain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let kind = match self {
            ToricDomain::Concave(_) => "concave_pl",
            ToricDomain::Convex(_) => "convex_pl",
        };
        let verts: Vec<[String; 2]> = self
            .vertices()
            .iter()
            .map(|(x, y)| [format_rational(x), format_rational(y)])
            .collect();
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("type", kind)?;
        map.serialize_entry("vertices", &verts)?;
        map.end()
    }
}

/// Weights of a concave domain, or head and negative weights of a convex one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightData {
    #[serde(
        with = "crate::scalar::serde_rational::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub head: Option<Rational>,
    /// Sorted nonincreasing.
    #[serde(with = "crate::scalar::serde_rational::vec")]
    pub weights: Vec<Rational>,
}

impl WeightData {
    pub fn sum_of_squares(&self) -> Rational {
        self.weights.iter().fold(Rational::zero(), |a, w| a + w * w)
    }

    /// Balls of the weights, if any.
    pub fn balls(&self) -> Option<BallConfig> {
        BallConfig::new(self.weights.clone()).ok()
    }
}

fn sorted(mut w: Vec<Rational>) -> Vec<Rational> {
    w.sort_by(|a, b| b.cmp(a));
    w
}

/// One peeling step: the largest inscribed standard triangle and the two
/// residual corners, renormalized.
struct Peel {
    weight: Rational,
    left: Option<Vec<Point>>,
    right: Option<Vec<Point>>,
}

fn peel(v: &[Point]) -> Peel {
    let sums: Vec<Rational> = v.iter().map(|(x, y)| x + y).collect();
    let w = sums.iter().min().expect("nonempty").clone();
    let il = sums.iter().position(|s| *s == w).expect("min present");
    let ir = sums.iter().rposition(|s| *s == w).expect("min present");
    let left = (v[0].1 > w).then(|| {
        merge_collinear(
            v[..=il]
                .iter()
                .map(|(x, y)| (x.clone(), x + y - &w))
                .collect(),
        )
    });
    let last = &v[v.len() - 1];
    let right = (last.0 > w).then(|| {
        merge_collinear(
            v[ir..]
                .iter()
                .map(|(x, y)| (x + y - &w, y.clone()))
                .collect(),
        )
    });
    Peel {
        weight: w,
        left,
        right,
    }
}

fn expand(
    start: Vec<Point>,
    out: &mut Vec<Rational>,
    trace: &mut dyn FnMut(&[Point], &Rational),
) -> Result<()> {
    let mut stack = vec![start];
    let mut steps = 0usize;
    while let Some(v) = stack.pop() {
        steps += 1;
        if steps > MAX_PEELS {
            return Err(Error::Budget {
                bound: "peels",
                value: MAX_PEELS as u64,
                detail: "weight expansion did not terminate".into(),
            });
        }
        let p = peel(&v);
        trace(&v, &p.weight);
        out.push(p.weight);
        stack.extend(p.right);
        stack.extend(p.left);
    }
    Ok(())
}

/// Weight sequence: the balls whose disjoint union the domain decomposes into.
pub fn weight_sequence(omega: &ConcaveDomain) -> Result<WeightData> {
    let mut w = Vec::new();
    expand(omega.vertices.clone(), &mut w, &mut |_, _| {})?;
    let data = WeightData {
        head: None,
        weights: sorted(w),
    };
    assert_eq!(
        data.sum_of_squares(),
        twice_area(&omega.vertices),
        "area identity"
    );
    Ok(data)
}

/// Corners of `T(head)` outside the domain, each as a concave domain's vertices.
fn corners(omega: &ConvexDomain) -> (Rational, Vec<Vec<Point>>) {
    let v = &omega.vertices;
    let sums: Vec<Rational> = v.iter().map(|(x, y)| x + y).collect();
    let b = sums.iter().max().expect("nonempty").clone();
    let il = sums.iter().position(|s| *s == b).expect("max present");
    let ir = sums.iter().rposition(|s| *s == b).expect("max present");
    let mut out = Vec::new();
    if v[0].1 < b {
        let mut c: Vec<Point> = v[..=il]
            .iter()
            .map(|(x, y)| (&b - x - y, x.clone()))
            .collect();
        c.reverse();
        out.push(merge_collinear(c));
    }
    if v[v.len() - 1].0 < b {
        let mut c: Vec<Point> = v[ir..]
            .iter()
            .map(|(x, y)| (y.clone(), &b - x - y))
            .collect();
        c.reverse();
        out.push(merge_collinear(c));
    }
    (b, out)
}

/// Head and negative weight sequence of a convex domain.
pub fn negative_weight_sequence(omega: &ConvexDomain) -> Result<WeightData> {
    let (head, pieces) = corners(omega);
    let mut w = Vec::new();
    for piece in pieces {
        expand(piece, &mut w, &mut |_, _| {})?;
    }
    let data = WeightData {
        head: Some(head.clone()),
        weights: sorted(w),
    };
    assert_eq!(
        &head * &head - data.sum_of_squares(),
        twice_area(&omega.vertices),
        "area identity"
    );
    Ok(data)
}

/// Weight expansion of `E(a, b)` by the Euclidean algorithm.
pub fn ellipsoid_weights(a: &Rational, b: &Rational) -> Result<WeightData> {
    if !a.is_positive() || !b.is_positive() {
        return Err(Error::Domain(
            "ellipsoid parameters must be positive".into(),
        ));
    }
    let (mut s, mut l) = if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    let mut w = Vec::new();
    while s.is_positive() {
        let n = (&l / &s).floor();
        let count = n
            .to_integer()
            .try_into()
            .ok()
            .filter(|&c: &usize| w.len() + c <= MAX_PEELS)
            .ok_or_else(|| Error::Budget {
                bound: "peels",
                value: MAX_PEELS as u64,
                detail: "ellipsoid weight expansion too long".into(),
            })?;
        w.extend(std::iter::repeat(s.clone()).take(count));
        let rem = &l - &n * &s;
        l = s;
        s = rem;
    }
    Ok(WeightData {
        head: None,
        weights: sorted(w),
    })
}

/// The ball configuration and target size whose open packing problem is
/// equivalent to embedding `omega1` into `omega2`.
pub fn embedding_problem(
    omega1: &ConcaveDomain,
    omega2: &ConvexDomain,
) -> Result<(BallConfig, Rational)> {
    let pos = weight_sequence(omega1)?;
    let neg = negative_weight_sequence(omega2)?;
    let mut sizes = pos.weights;
    sizes.extend(neg.weights);
    Ok((
        BallConfig::new(sizes)?,
        neg.head.expect("convex domains have a head"),
    ))
}

pub fn decide_concave_into_convex(
    omega1: &ConcaveDomain,
    omega2: &ConvexDomain,
    convention: Convention,
) -> Result<Decision> {
    decide_concave_into_convex_with(
        omega1,
        omega2,
        convention,
        DEFAULT_DEGREE_BUDGET,
        Engine::Combined,
    )
}

pub fn decide_concave_into_convex_with(
    omega1: &ConcaveDomain,
    omega2: &ConvexDomain,
    convention: Convention,
    d_budget: u32,
    engine: Engine,
) -> Result<Decision> {
    let (balls, head) = embedding_problem(omega1, omega2)?;
    decide_packing_with(&balls, &head, convention, d_budget, engine)
}

/// Rational approximations of a pair of domains that may not be rational.
pub struct Approximation {
    pub source_inner: ConcaveDomain,
    pub source_outer: ConcaveDomain,
    pub target_inner: ConvexDomain,
    pub target_outer: ConvexDomain,
}

/// Decides an embedding between possibly irrational domains by refining
/// rational approximations until the answer stabilizes.
///
/// `approx(level)` must return domains with `source_inner ⊆ source ⊆ source_outer`
/// and `target_inner ⊆ target ⊆ target_outer`. The answer is `Yes` once the
/// outer source fits into the inner target and `No` once the inner source
/// does not fit into the outer target.
pub fn decide_by_approximation(
    mut approx: impl FnMut(u32) -> Result<Approximation>,
    levels: u32,
    convention: Convention,
) -> Result<Decision> {
    for level in 0..levels {
        let a = approx(level)?;
        if decide_concave_into_convex(&a.source_outer, &a.target_inner, convention)?
            == Decision::Yes
        {
            return Ok(Decision::Yes);
        }
        if decide_concave_into_convex(&a.source_inner, &a.target_outer, convention)? == Decision::No
        {
            return Ok(Decision::No);
        }
    }
    Ok(Decision::Undecided)
}

#[cfg(test)]
pub(crate) fn stages(omega: &ConcaveDomain) -> Vec<(Rational, Rational, Rational)> {
    let mut out = Vec::new();
    let mut w = Vec::new();
    expand(omega.vertices.clone(), &mut w, &mut |v, wt| {
        out.push((wt.clone(), v[v.len() - 1].0.clone(), v[0].1.clone()))
    })
    .unwrap();
    out
}
