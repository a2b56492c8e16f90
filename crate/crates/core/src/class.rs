//! Numerical classes of framed twisted quiver bundles and the Euler form.

use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::quiver::FramedQuiverShape;

/// Rank and degree of the sheaf sitting at one gauged vertex.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexCharge {
    pub rank: u32,
    pub degree: i64,
}

impl VertexCharge {
    pub fn new(rank: u32, degree: i64) -> Self {
        Self { rank, degree }
    }
}

/// A numerical class: the framing rank `v0` plus rank and degree at every
/// gauged vertex, listed in the shape's gauged-vertex order.
///
/// The derived order (`v0` first, then the vertices lexicographically) is the
/// canonical order used for every enumeration in the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NumericalClass {
    v0: u32,
    parts: Vec<VertexCharge>,
}

impl NumericalClass {
    pub fn new(v0: u32, parts: Vec<VertexCharge>) -> Self {
        Self { v0, parts }
    }

    /// Shorthand taking `(rank, degree)` pairs.
    pub fn from_pairs(v0: u32, pairs: &[(u32, i64)]) -> Self {
        Self::new(v0, pairs.iter().map(|&(r, d)| VertexCharge::new(r, d)).collect())
    }

    pub fn zero(gauged: usize) -> Self {
        Self::new(0, vec![VertexCharge::default(); gauged])
    }

    pub fn v0(&self) -> u32 {
        self.v0
    }

    pub fn parts(&self) -> &[VertexCharge] {
        &self.parts
    }

    pub fn arity(&self) -> usize {
        self.parts.len()
    }

    pub fn is_framed(&self) -> bool {
        self.v0 > 0
    }

    pub fn is_zero(&self) -> bool {
        self.v0 == 0 && self.parts.iter().all(|p| p.rank == 0 && p.degree == 0)
    }

    /// Total rank over the gauged vertices.
    pub fn total_rank(&self) -> u64 {
        self.parts.iter().map(|p| u64::from(p.rank)).sum()
    }

    /// Total degree over the gauged vertices.
    pub fn total_degree(&self) -> i64 {
        self.parts.iter().map(|p| p.degree).sum()
    }

    /// Componentwise difference, `None` if any rank (or `v0`) would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.arity(), other.arity(), "class arity mismatch");
        let v0 = self.v0.checked_sub(other.v0)?;
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| {
                Some(VertexCharge::new(
                    a.rank.checked_sub(b.rank)?,
                    a.degree - b.degree,
                ))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Self::new(v0, parts))
    }

    /// Whether every rank of `self` is at most the matching rank of `other`.
    pub fn ranks_within(&self, other: &Self) -> bool {
        self.parts
            .iter()
            .zip(&other.parts)
            .all(|(a, b)| a.rank <= b.rank)
    }

    pub fn scaled(&self, k: u32) -> Self {
        Self::new(
            self.v0 * k,
            self.parts
                .iter()
                .map(|p| VertexCharge::new(p.rank * k, p.degree * i64::from(k)))
                .collect(),
        )
    }

    pub fn check_arity(&self, shape: &FramedQuiverShape) -> Result<()> {
        let expected = shape.gauged().len();
        if self.arity() != expected {
            return Err(Error::ClassArity {
                class: self.to_string(),
                found: self.arity(),
                expected,
            });
        }
        Ok(())
    }
}

/// Componentwise sum of two classes.
pub fn add_classes(a: &NumericalClass, b: &NumericalClass) -> NumericalClass {
    assert_eq!(a.arity(), b.arity(), "class arity mismatch");
    NumericalClass::new(
        a.v0 + b.v0,
        a.parts
            .iter()
            .zip(&b.parts)
            .map(|(x, y)| VertexCharge::new(x.rank + y.rank, x.degree + y.degree))
            .collect(),
    )
}

impl Add for &NumericalClass {
    type Output = NumericalClass;

    fn add(self, other: &NumericalClass) -> NumericalClass {
        add_classes(self, other)
    }
}

/// Written `(v0 | r1,d1 | r2,d2 ...)`.
impl fmt::Display for NumericalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.v0)?;
        for p in &self.parts {
            write!(f, " | {},{}", p.rank, p.degree)?;
        }
        write!(f, ")")
    }
}

/// The framing vector space `K`, through its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FramingContext {
    dim_k: u32,
}

impl FramingContext {
    pub fn new(dim_k: u32) -> Result<Self> {
        if dim_k == 0 {
            return Err(Error::FramingRank { v0: 0, dim_k });
        }
        Ok(Self { dim_k })
    }

    pub fn dim_k(&self) -> u32 {
        self.dim_k
    }

    /// Framing ranks are restricted to `{0, dim K}`.
    pub fn check_class(&self, class: &NumericalClass) -> Result<()> {
        if class.v0 == 0 || class.v0 == self.dim_k {
            Ok(())
        } else {
            Err(Error::FramingRank {
                v0: class.v0,
                dim_k: self.dim_k,
            })
        }
    }

    pub fn is_framed(&self, class: &NumericalClass) -> bool {
        class.v0 == self.dim_k
    }
}

/// Genus of the curve and the degrees of the twisting line bundles, one per
/// arrow of the double quiver (indexed like the double's arrows).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveTwistData {
    pub genus: u32,
    pub degrees: Vec<i64>,
}

impl CurveTwistData {
    pub fn new(genus: u32, degrees: Vec<i64>) -> Self {
        Self { genus, degrees }
    }

    /// Looks up a degree for every doubled arrow by id.
    pub fn from_lookup(
        genus: u32,
        shape: &FramedQuiverShape,
        mut degree_of: impl FnMut(&str) -> Option<i64>,
    ) -> Result<Self> {
        let q = shape.quiver();
        let degrees = (0..q.arrow_count())
            .map(|a| degree_of(q.arrow_id(a)).ok_or_else(|| Error::MissingTwist(q.arrow_id(a).to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { genus, degrees })
    }

    /// Degree of the anticanonical bundle, `2 - 2g`.
    pub fn anticanonical_degree(&self) -> i64 {
        2 - 2 * i64::from(self.genus)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistPairCheck {
    pub arrow: String,
    pub sum: i64,
    pub expected: i64,
}

impl TwistPairCheck {
    pub fn holds(&self) -> bool {
        self.sum == self.expected
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistReport {
    pub pairs: Vec<TwistPairCheck>,
}

impl TwistReport {
    pub fn holds(&self) -> bool {
        self.pairs.iter().all(TwistPairCheck::holds)
    }

    pub fn first_failure(&self) -> Option<&TwistPairCheck> {
        self.pairs.iter().find(|p| !p.holds())
    }
}

/// Checks `d(M_b) + d(M_b*) = 2 - 2g` for every original arrow `b`.
pub fn validate_twist(data: &CurveTwistData, shape: &FramedQuiverShape) -> Result<TwistReport> {
    let q = shape.quiver();
    if data.degrees.len() != q.arrow_count() {
        let missing = q.arrow_id(data.degrees.len().min(q.arrow_count().saturating_sub(1)));
        return Err(Error::MissingTwist(missing.to_string()));
    }
    let expected = data.anticanonical_degree();
    let pairs = (0..q.original_count())
        .map(|b| TwistPairCheck {
            arrow: q.arrow_id(b).to_string(),
            sum: data.degrees[b] + data.degrees[q.reverse(b)],
            expected,
        })
        .collect();
    Ok(TwistReport { pairs })
}

/// Value of the Euler form together with whether both arguments were framed,
/// which lies outside the hypothesis under which the closed form was derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EulerValue {
    pub value: i64,
    pub doubly_framed: bool,
}

/// A shape with validated twist data, ready to evaluate the Euler form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerContext {
    shape: FramedQuiverShape,
    twist: CurveTwistData,
}

impl EulerContext {
    pub fn new(shape: FramedQuiverShape, twist: CurveTwistData) -> Result<Self> {
        let report = validate_twist(&twist, &shape)?;
        if let Some(bad) = report.first_failure() {
            return Err(Error::TwistPairing {
                arrow: bad.arrow.clone(),
                sum: bad.sum,
                expected: bad.expected,
            });
        }
        Ok(Self { shape, twist })
    }

    pub fn shape(&self) -> &FramedQuiverShape {
        &self.shape
    }

    pub fn twist(&self) -> &CurveTwistData {
        &self.twist
    }

    pub fn genus(&self) -> u32 {
        self.twist.genus
    }

    /// `(rank, degree)` at vertex `v`; the framing vertex carries the
    /// trivial bundle of rank `v0`.
    fn charge(&self, class: &NumericalClass, v: usize) -> (i64, i64) {
        if v == self.shape.framing_vertex() {
            (i64::from(class.v0), 0)
        } else {
            let pos = self.shape.gauged_position(v).expect("gauged vertex");
            let p = class.parts[pos];
            (i64::from(p.rank), p.degree)
        }
    }

    /// `χ(E, F)` from ranks, degrees, twist degrees and genus.
    pub fn euler(&self, e: &NumericalClass, f: &NumericalClass) -> i64 {
        let q = self.shape.quiver();
        let one_minus_g = 1 - i64::from(self.twist.genus);
        let mut total = 0i64;
        for a in 0..q.arrow_count() {
            let (r_e, d_e) = self.charge(e, q.tail(a));
            let (r_f, d_f) = self.charge(f, q.head(a));
            total += d_e * r_f - d_f * r_e - self.twist.degrees[a] * r_e * r_f + one_minus_g * r_e * r_f;
        }
        for &v in self.shape.gauged() {
            let (r_e, d_e) = self.charge(e, v);
            let (r_f, d_f) = self.charge(f, v);
            total += 2 * (-d_e * r_f + d_f * r_e);
        }
        total
    }

    pub fn euler_checked(&self, e: &NumericalClass, f: &NumericalClass) -> Result<EulerValue> {
        e.check_arity(&self.shape)?;
        f.check_arity(&self.shape)?;
        Ok(EulerValue {
            value: self.euler(e, f),
            doubly_framed: e.is_framed() && f.is_framed(),
        })
    }
}

/// One-shot evaluation; rejects twist data that breaks the pairing constraint.
pub fn euler_form(
    e: &NumericalClass,
    f: &NumericalClass,
    data: &CurveTwistData,
    shape: &FramedQuiverShape,
) -> Result<EulerValue> {
    EulerContext::new(shape.clone(), data.clone())?.euler_checked(e, f)
}
