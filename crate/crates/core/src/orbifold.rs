//! Orbifold Euler numbers in exact arithmetic, and the exclusion checker for
//! the ways a `G_{m,k}`-symmetric surface can meet the fixed circles `γ_{j,l}`.
//!
//! Every exclusion argument has the same shape. A hypothetical surface `M` of
//! genus `mk` has `χ(M) = |G| · χ_o(M/G)`. The quotient's local structure
//! forces `χ_o = c + s·t` for some integer `t`, so `t = (χ/|G| − c)/s` must be
//! an integer. When it is not, the pattern is impossible.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sphere::GreatCircle;
use crate::symmetry::{gamma, LawsonParams};
use crate::tolerance::TOL;

/// Exact fraction, always reduced with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// `num / den`; `None` when `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Option<Self> {
        let den = den.into();
        if den.is_zero() {
            return None;
        }
        Some(Rational(BigRational::new(num.into(), den)))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn checked_div(&self, other: &Rational) -> Option<Rational> {
        (!other.0.is_zero()).then(|| Rational(&self.0 / &other.0))
    }

    /// Distance to the nearest integer.
    pub fn integer_gap(&self) -> Rational {
        let below = self - &Rational::integer(self.floor());
        let above = &Rational::integer(self.ceil()) - self;
        below.min(above)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

binary_op!(Add, add);
binary_op!(Sub, sub);
binary_op!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    /// Panics on division by zero, like integer division; see `checked_div`.
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("not a rational: {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        Rational::new(num, den).ok_or_else(bad)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Cell counts of a quotient orbifold with their weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedComplex {
    faces: u64,
    edges: Vec<(u64, Rational)>,
    vertices: Vec<(u64, Rational)>,
}

impl WeightedComplex {
    /// Edge weights must be 1 or 1/2; vertex weights 1, 1/2 or 1/(2n) with `n ≥ 2`.
    pub fn new(
        faces: u64,
        edges: Vec<(u64, Rational)>,
        vertices: Vec<(u64, Rational)>,
    ) -> Result<Self> {
        let one = Rational::integer(1);
        let half = Rational::new(1, 2).expect("nonzero");
        for (_, w) in &edges {
            if *w != one && *w != half {
                return Err(Error::InvalidParams(format!("edge weight {w} is not 1 or 1/2")));
            }
        }
        for (_, w) in &vertices {
            let corner = w.numer().is_one()
                && w.denom() % 2u32 == BigInt::zero()
                && *w.denom() >= BigInt::from(4);
            if *w != one && *w != half && !corner {
                return Err(Error::InvalidParams(format!(
                    "vertex weight {w} is not 1, 1/2 or 1/(2n)"
                )));
            }
        }
        Ok(WeightedComplex {
            faces,
            edges,
            vertices,
        })
    }

    pub fn empty() -> Self {
        WeightedComplex {
            faces: 0,
            edges: Vec::new(),
            vertices: Vec::new(),
        }
    }

    /// The quotient `ξ_{m,k}/G_{m,k}`: a disk with four mirror edges and four
    /// corners of orders `m+1`, `k+1`, `m+1`, `k+1`.
    pub fn lawson(params: &LawsonParams) -> Self {
        let corner = |n: u32| Rational::new(1, 2 * (u64::from(n) + 1)).expect("nonzero");
        WeightedComplex {
            faces: 1,
            edges: vec![(4, Rational::new(1, 2).expect("nonzero"))],
            vertices: vec![(2, corner(params.m())), (2, corner(params.k()))],
        }
    }
}

/// Weighted alternating sum of faces, edges and vertices.
pub fn chi_o_local(c: &WeightedComplex) -> Rational {
    let sum = |cells: &[(u64, Rational)]| {
        cells
            .iter()
            .fold(Rational::zero(), |acc, (n, w)| acc + Rational::integer(*n) * w.clone())
    };
    Rational::integer(c.faces) - sum(&c.edges) + sum(&c.vertices)
}

/// `χ / order`, the orbifold Euler number of a quotient by a group of that order.
pub fn chi_o_global(chi: i64, order: u64) -> Result<Rational> {
    if order == 0 {
        return Err(Error::InvalidParams("group order must be positive".into()));
    }
    Ok(Rational::new(chi, order).expect("nonzero"))
}

/// `(1 − mk) / ((m+1)(k+1))`.
pub fn lawson_chi_o(params: &LawsonParams) -> Rational {
    chi_o_local(&WeightedComplex::lawson(params))
}

fn genus_euler(params: &LawsonParams) -> BigInt {
    BigInt::from(2) - BigInt::from(2) * BigInt::from(params.m()) * BigInt::from(params.k())
}

fn order(params: &LawsonParams) -> BigInt {
    BigInt::from(2) * (BigInt::from(params.m()) + BigInt::one()) * (BigInt::from(params.k()) + BigInt::one())
}

/// The counting arguments used to rule out intersection patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Argument {
    /// A surface avoiding the corners crosses the edges an even number of
    /// times, so its orbifold Euler number is an integer.
    EvenEdgeCrossings,
    /// A surface through a corner is tangent to, hence contains, one of the
    /// two circles through it.
    VertexTouch,
    /// A contained circle forces every circle meeting it non-orthogonally.
    CirclePropagation,
    /// For `k = 1`, a surface holding only the circles through one `P`
    /// corner has half-integer defects that the Euler number cannot absorb.
    HalfCircleParity,
}

/// `2(m+1)(k+1) > 2mk − 2 > 0` as exact integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityChain {
    pub order: BigIntString,
    pub negated_euler: BigIntString,
    pub holds: bool,
}

/// Integer serialized as a decimal string so JSON stays exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigIntString(pub BigInt);

impl Serialize for BigIntString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for BigIntString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map(BigIntString).map_err(serde::de::Error::custom)
    }
}

/// Why an equation in an integer unknown has no solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub argument: Argument,
    /// The equation the unknown would have to satisfy.
    pub equation: String,
    /// Its unique rational solution.
    pub solution: Rational,
    pub floor: BigIntString,
    pub ceil: BigIntString,
    /// Distance from the solution to the nearest integer; positive.
    pub gap: Rational,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inequality: Option<InequalityChain>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Verdict {
    Excluded(Witness),
    /// The equation has the integer solution `solution`.
    Admissible { argument: Argument, solution: Rational },
}

impl Verdict {
    pub fn is_excluded(&self) -> bool {
        matches!(self, Verdict::Excluded(_))
    }
}

/// Solve `chi / order = offset + step · t` for `t` and test integrality.
fn lattice_exclusion(
    argument: Argument,
    equation: String,
    chi: BigInt,
    order: BigInt,
    offset: Rational,
    step: Rational,
) -> Verdict {
    let target = Rational(BigRational::new(chi, order));
    let solution = (target - offset)
        .checked_div(&step)
        .expect("lattice step is nonzero");
    if solution.is_integer() {
        Verdict::Admissible { argument, solution }
    } else {
        Verdict::Excluded(Witness {
            argument,
            equation,
            floor: BigIntString(solution.floor()),
            ceil: BigIntString(solution.ceil()),
            gap: solution.integer_gap(),
            solution,
            inequality: None,
        })
    }
}

/// A surface meeting `Γ_{0,0}` only at interior edge points: `|G| · z = 2 − 2mk`
/// with `z` an integer.
pub fn exclude_interior_only(params: &LawsonParams) -> Result<Verdict> {
    if u64::from(params.m()) * u64::from(params.k()) < 2 {
        return Err(Error::InvalidParams(format!(
            "({}, {}) has mk < 2",
            params.m(),
            params.k()
        )));
    }
    let order = order(params);
    let chi = genus_euler(params);
    let equation = format!("{order}·z = {chi}");
    let mut verdict = lattice_exclusion(
        Argument::EvenEdgeCrossings,
        equation,
        chi.clone(),
        order.clone(),
        Rational::zero(),
        Rational::integer(1),
    );
    if let Verdict::Excluded(w) = &mut verdict {
        let negated = -chi;
        w.inequality = Some(InequalityChain {
            holds: order > negated && negated > BigInt::zero(),
            order: BigIntString(order),
            negated_euler: BigIntString(negated),
        });
    }
    Ok(verdict)
}

/// For `m > k = 1`: a surface holding `γ_{0,·}` but not `γ_{1,·}` would need
/// `4(m+1)(a/2 + 1/4 + 1/(m+1)) = 2 − 2m` with `a` an integer, that is
/// `(2a + 3)(m + 1) = 0`.
pub fn exclude_partial_circles(params: &LawsonParams) -> Result<Verdict> {
    if params.k() != 1 || params.m() < 2 {
        return Err(Error::InvalidParams(format!(
            "({}, {}) is not of the form m > k = 1",
            params.m(),
            params.k()
        )));
    }
    let m1 = BigInt::from(params.m()) + BigInt::one();
    let order = order(params);
    let chi = genus_euler(params);
    // P_0 has weight 1/4, Q_0 and Q_1 each 1/(2(m+1)); the two mirror edges
    // on γ_{0,0} and γ_{0,1} and all remaining cells are absorbed into a/2.
    let offset = Rational::new(1, 4).expect("nonzero") + Rational(BigRational::new(1.into(), m1.clone()));
    let equation = format!("{order}·(a/2 + 1/4 + 1/{m1}) = {chi}");
    Ok(lattice_exclusion(
        Argument::HalfCircleParity,
        equation,
        chi,
        order,
        offset,
        Rational::new(1, 2).expect("nonzero"),
    ))
}

/// Index of the great circle `γ_{j,l}`, with `j` mod `k+1` and `l` mod `m+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CircleId {
    pub j: u32,
    pub l: u32,
}

impl CircleId {
    pub fn new(params: &LawsonParams, j: i64, l: i64) -> Self {
        let pc = i64::from(params.k()) + 1;
        let qc = i64::from(params.m()) + 1;
        CircleId {
            j: j.rem_euclid(pc) as u32,
            l: l.rem_euclid(qc) as u32,
        }
    }

    pub fn all(params: &LawsonParams) -> BTreeSet<CircleId> {
        (0..=params.k())
            .flat_map(|j| (0..=params.m()).map(move |l| CircleId { j, l }))
            .collect()
    }
}

/// A corner of `Γ_{0,0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corner {
    P(u8),
    Q(u8),
}

/// How a symmetric surface meets the fixed circles, up to symmetry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntersectionPattern {
    ContainsAllCircles,
    /// Meets `Γ_{0,0}` only at interior points of its edges.
    InteriorOnly,
    /// Contains exactly these circles.
    PartialCircles { circles: BTreeSet<CircleId> },
    /// Passes through a corner of `Γ_{0,0}`.
    VertexTouching { corner: Corner },
}

/// Replace a corner touch by the circle along the first edge of `Γ_{0,0}`
/// leaving that corner; the surface contains it or the circle along the
/// other incident edge, and propagation treats both alike.
pub fn vertex_touch_forces_edge(params: &LawsonParams, pattern: IntersectionPattern) -> IntersectionPattern {
    match pattern {
        IntersectionPattern::VertexTouching { corner } => {
            // Edges of Γ_{0,0}: P0Q0 ⊂ γ_{0,0}, Q0P1 ⊂ γ_{1,0}, P1Q1 ⊂ γ_{1,1}, Q1P0 ⊂ γ_{0,1}.
            let (j, l) = match corner {
                Corner::P(0) => (0, 0),
                Corner::Q(0) => (1, 0),
                Corner::P(_) => (1, 1),
                Corner::Q(_) => (0, 1),
            };
            IntersectionPattern::PartialCircles {
                circles: BTreeSet::from([CircleId::new(params, j, l)]),
            }
        }
        other => other,
    }
}

/// True when the two circles share a point and their tangents there are orthogonal.
///
/// Circles with the same `j` share `±P_j`, circles with the same `l` share
/// `±Q_l`; distinct circles with neither in common do not meet.
pub fn meet_orthogonally(params: &LawsonParams, a: CircleId, b: CircleId) -> Option<bool> {
    let circle = |c: CircleId| gamma(params, i64::from(c.j), i64::from(c.l));
    meet_orthogonally_with(params, a, b, &circle(a), &circle(b))
}

fn meet_orthogonally_with(
    params: &LawsonParams,
    a: CircleId,
    b: CircleId,
    ga: &GreatCircle,
    gb: &GreatCircle,
) -> Option<bool> {
    let shared = if a == b {
        return None;
    } else if a.j == b.j {
        params.p(i64::from(a.j))
    } else if a.l == b.l {
        params.q(i64::from(a.l))
    } else {
        return None;
    };
    let ta = ga.tangent_at(&shared).expect("shared point lies on the circle");
    let tb = gb.tangent_at(&shared).expect("shared point lies on the circle");
    Some(ta.dot(&tb).abs() < TOL.orth)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Propagation {
    /// Every circle is contained; `arguments` lists what was needed.
    ForcesAll { arguments: Vec<Argument> },
    /// The circles cannot all be forced, yet the partial pattern is not ruled out.
    Contradiction { reason: String },
}

/// Close the contained circles under non-orthogonal meeting, then settle
/// what is left.
pub fn propagate_circles(params: &LawsonParams, contained: &BTreeSet<CircleId>) -> Result<Propagation> {
    if u64::from(params.m()) * u64::from(params.k()) < 2 {
        return Err(Error::InvalidParams("propagation needs mk >= 2".into()));
    }
    let all = CircleId::all(params);
    if contained.is_empty() || !contained.is_subset(&all) {
        return Err(Error::InvalidParams(
            "pattern must name at least one valid circle".into(),
        ));
    }
    let closure = circle_closure(params, contained);
    if closure == all {
        return Ok(Propagation::ForcesAll {
            arguments: vec![Argument::CirclePropagation],
        });
    }
    if params.k() == 1 {
        // The closure is the fan of circles through one P corner; the only
        // way out is for the surface to stop there, which parity forbids.
        if exclude_partial_circles(params)?.is_excluded() {
            return Ok(Propagation::ForcesAll {
                arguments: vec![Argument::CirclePropagation, Argument::HalfCircleParity],
            });
        }
    }
    Ok(Propagation::Contradiction {
        reason: format!(
            "propagation stops at {} of {} circles",
            closure.len(),
            all.len()
        ),
    })
}

fn circle_closure(params: &LawsonParams, start: &BTreeSet<CircleId>) -> BTreeSet<CircleId> {
    let width = params.m() as usize + 1;
    let circles: Vec<GreatCircle> = CircleId::all(params)
        .iter()
        .map(|c| gamma(params, i64::from(c.j), i64::from(c.l)))
        .collect();
    let circle = |c: CircleId| &circles[c.j as usize * width + c.l as usize];
    let mut closure = start.clone();
    let mut frontier: Vec<CircleId> = start.iter().copied().collect();
    while let Some(c) = frontier.pop() {
        // Only circles sharing a `P` or a `Q` with `c` can meet it.
        let same_j = (0..=params.m()).map(|l| CircleId { j: c.j, l });
        let same_l = (0..=params.k()).map(|j| CircleId { j, l: c.l });
        for d in same_j.chain(same_l) {
            if !closure.contains(&d)
                && meet_orthogonally_with(params, c, d, circle(c), circle(d)) == Some(false)
            {
                closure.insert(d);
                frontier.push(d);
            }
        }
    }
    closure
}

/// Verdicts on every pattern other than containing all circles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub interior_only: Verdict,
    /// What a corner touch normalizes to.
    pub vertex_touching: IntersectionPattern,
    pub partial_circles: Propagation,
    pub conclusion: IntersectionPattern,
}

/// Decide which intersection pattern a `G_{m,k}`-symmetric surface of genus
/// `mk` can have. For valid parameters the answer is always that it contains
/// every circle.
pub fn classify(params: &LawsonParams) -> Result<Classification> {
    let interior_only = exclude_interior_only(params)?;
    let vertex_touching = vertex_touch_forces_edge(
        params,
        IntersectionPattern::VertexTouching {
            corner: Corner::P(0),
        },
    );
    let circles = match &vertex_touching {
        IntersectionPattern::PartialCircles { circles } => circles.clone(),
        _ => BTreeSet::from([CircleId { j: 0, l: 0 }]),
    };
    let partial_circles = propagate_circles(params, &circles)?;
    let conclusion = match (&interior_only, &partial_circles) {
        (Verdict::Excluded(_), Propagation::ForcesAll { .. }) => {
            IntersectionPattern::ContainsAllCircles
        }
        (Verdict::Admissible { .. }, _) => IntersectionPattern::InteriorOnly,
        (_, Propagation::Contradiction { .. }) => IntersectionPattern::PartialCircles {
            circles: circle_closure(params, &circles),
        },
    };
    Ok(Classification {
        interior_only,
        vertex_touching,
        partial_circles,
        conclusion,
    })
}

/// Euler numbers by both routes, plus the classification when `mk ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub m: u32,
    pub k: u32,
    pub chi_o_local: Rational,
    pub chi_o_global: Rational,
    pub agree: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classification: Option<Classification>,
    /// Why no classification was attempted.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub refused: Option<String>,
}

pub fn certificate(params: &LawsonParams) -> Result<Certificate> {
    let local = chi_o_local(&WeightedComplex::lawson(params));
    let chi = 2 - 2 * i64::from(params.m()) * i64::from(params.k());
    let global = chi_o_global(chi, params.group_order() as u64)?;
    let (classification, refused) = match classify(params) {
        Ok(c) => (Some(c), None),
        Err(Error::InvalidParams(reason)) => (None, Some(reason)),
        Err(e) => return Err(e),
    };
    Ok(Certificate {
        m: params.m(),
        k: params.k(),
        agree: local == global,
        chi_o_local: local,
        chi_o_global: global,
        classification,
        refused,
    })
}
