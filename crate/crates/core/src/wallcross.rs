//! The Lie algebra on numerical classes and transport of generalized DT
//! invariants across walls.
//!
//! Invariants are inputs here: the table holds `J(β)` for unframed classes
//! and `J_τ(γ)` for framed classes in each chamber, and the functions below
//! move the framed values from one chamber to the next.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::class::{CurveTwistData, EulerContext, FramingContext, NumericalClass};
use crate::error::{Error, Result};
use crate::quiver::FramedQuiverShape;
use crate::rational::{self, Rational};
use crate::stability::{self, ChamberDecomposition, Side, SupportSet};

/// Finite combination of basis vectors `e_γ`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LieElement {
    terms: BTreeMap<NumericalClass, Rational>,
}

impl LieElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `coeff · e_γ`; the class must have `v0 ∈ {0, dim K}`.
    pub fn basis(class: NumericalClass, coeff: Rational, ctx: &FramingContext) -> Result<Self> {
        ctx.check_class(&class)?;
        let mut out = Self::zero();
        out.add_term(class, coeff);
        Ok(out)
    }

    fn add_term(&mut self, class: NumericalClass, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(class).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn from_terms(
        terms: impl IntoIterator<Item = (NumericalClass, Rational)>,
        ctx: &FramingContext,
    ) -> Result<Self> {
        let mut out = Self::zero();
        for (c, k) in terms {
            ctx.check_class(&c)?;
            out.add_term(c, k);
        }
        Ok(out)
    }

    pub fn terms(&self) -> &BTreeMap<NumericalClass, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, class: &NumericalClass) -> Rational {
        self.terms.get(class).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (c, k) in &other.terms {
            out.add_term(c.clone(), k.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(c, v)| (c.clone(), v * k)).collect(),
        }
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (c, k)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({k})e{c}")?;
        }
        Ok(())
    }
}

/// `[e_γ, e_γ'] = (-1)^{χ(γ,γ')} χ(γ,γ') e_{γ+γ'}`, zero once the framing
/// ranks add up past `dim K`.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    euler: EulerContext,
    framing: FramingContext,
}

impl LieAlgebra {
    pub fn new(euler: EulerContext, framing: FramingContext) -> Self {
        Self { euler, framing }
    }

    /// Validates the twist data against the shape first.
    pub fn from_data(shape: &FramedQuiverShape, data: &CurveTwistData, framing: FramingContext) -> Result<Self> {
        Ok(Self::new(EulerContext::new(shape.clone(), data.clone())?, framing))
    }

    pub fn euler(&self) -> &EulerContext {
        &self.euler
    }

    pub fn framing(&self) -> &FramingContext {
        &self.framing
    }

    pub fn genus(&self) -> u32 {
        self.euler.genus()
    }

    /// Structure constant of `[e_a, e_b]`, or `None` when truncated.
    pub fn structure_constant(&self, a: &NumericalClass, b: &NumericalClass) -> Option<Rational> {
        if u64::from(a.v0()) + u64::from(b.v0()) > u64::from(self.framing.dim_k()) {
            return None;
        }
        let chi = self.euler.euler(a, b);
        Some(rational::sign_pow(chi) * rational::int(chi))
    }

    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> LieElement {
        let mut out = LieElement::zero();
        for (a, ka) in &x.terms {
            for (b, kb) in &y.terms {
                if let Some(c) = self.structure_constant(a, b) {
                    out.add_term(a + b, c * ka * kb);
                }
            }
        }
        out
    }
}

/// One-shot bracket that builds the algebra from raw data.
pub fn bracket(
    x: &LieElement,
    y: &LieElement,
    data: &CurveTwistData,
    shape: &FramedQuiverShape,
    ctx: &FramingContext,
) -> Result<LieElement> {
    Ok(LieAlgebra::from_data(shape, data, *ctx)?.bracket(x, y))
}

pub type FramedValues = BTreeMap<NumericalClass, Rational>;

/// Unframed `J(β)` and framed `J_τ(γ)` per chamber representative.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvariantTable {
    pub unframed: BTreeMap<NumericalClass, Rational>,
    pub framed_at: BTreeMap<Rational, FramedValues>,
}

impl InvariantTable {
    pub fn new(unframed: BTreeMap<NumericalClass, Rational>) -> Result<Self> {
        SupportSet::new(unframed.keys().cloned())?;
        Ok(Self {
            unframed,
            framed_at: BTreeMap::new(),
        })
    }

    /// The unframed classes with a recorded invariant.
    pub fn support(&self) -> SupportSet {
        SupportSet::new(self.unframed.keys().cloned()).expect("checked on construction")
    }
}

/// The `e_γ` coefficient of
/// `Σ_{l≥2} 1/(l-1)! Σ_{HN-(γ,τ0,l)} [J(γ1)e_{γ1}, [..., [J(γ_{l-1})e_{γ_{l-1}}, J_{τ+}(γl)e_{γl}]...]]`,
/// so that `J_{τ-}(γ) = J_{τ+}(γ) + wall_correction(...)`.
///
/// `plus_side` holds `J_{τ+}`; every framed factor the sum touches must be
/// present there.
pub fn wall_correction(
    gamma: &NumericalClass,
    tau0: &Rational,
    unframed: &BTreeMap<NumericalClass, Rational>,
    plus_side: &FramedValues,
    lie: &LieAlgebra,
) -> Result<Rational> {
    lie.framing.check_class(gamma)?;
    if !lie.framing.is_framed(gamma) {
        return Err(Error::NotFramed(gamma.to_string()));
    }
    let support = SupportSet::new(unframed.keys().cloned())?;
    let tuples = stability::enumerate_hn_all(gamma, tau0, &support, Side::Minus)?;

    let missing: BTreeSet<&NumericalClass> = tuples
        .iter()
        .filter(|t| t.len() >= 2)
        .map(|t| t.last().expect("nonempty tuple"))
        .filter(|c| !plus_side.contains_key(*c))
        .collect();
    if !missing.is_empty() {
        return Err(Error::InsufficientTable(missing.into_iter().map(ToString::to_string).collect()));
    }

    let mut total = Rational::zero();
    for tuple in tuples.iter().filter(|t| t.len() >= 2) {
        let l = tuple.len();
        let last = &tuple[l - 1];
        let mut coeff = plus_side[last].clone();
        let mut acc = last.clone();
        for c in tuple[..l - 1].iter().rev() {
            if coeff.is_zero() {
                break;
            }
            match lie.structure_constant(c, &acc) {
                Some(k) => coeff *= k * &unframed[c],
                None => coeff = Rational::zero(),
            }
            acc = c + &acc;
        }
        total += coeff / rational::factorial(l - 1);
    }
    Ok(total)
}

/// `γ` together with every `γ - s`, `s` a nonempty sum of unframed classes:
/// the framed classes whose values a wall crossing for `γ` can consult.
pub fn framed_closure(
    gamma: &NumericalClass,
    unframed: &BTreeMap<NumericalClass, Rational>,
) -> Result<BTreeSet<NumericalClass>> {
    let support = SupportSet::new(unframed.keys().cloned())?;
    let mut out = BTreeSet::from([gamma.clone()]);
    out.extend(support.closure_within(gamma).classes().iter().filter_map(|s| gamma.checked_sub(s)));
    Ok(out)
}

/// Framed invariants in every chamber, obtained by crossing walls downward
/// from the top chamber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallCrossing {
    /// The input chambers refined by the walls of every propagated class.
    pub decomposition: ChamberDecomposition,
    /// `tables[i]` belongs to `decomposition.chambers[i]`.
    pub tables: Vec<FramedValues>,
}

impl WallCrossing {
    pub fn values_at(&self, tau: &Rational) -> Option<&FramedValues> {
        let idx = self
            .decomposition
            .chambers
            .iter()
            .position(|c| c.contains(tau) && !self.decomposition.walls.contains(tau))?;
        Some(&self.tables[idx])
    }

    /// The table at the chamber just above and just below each interior wall.
    pub fn wall_sides(&self) -> impl Iterator<Item = (&Rational, &FramedValues, &FramedValues)> {
        (1..self.tables.len()).map(move |i| {
            (
                &self.decomposition.chambers[i].lower,
                &self.tables[i],
                &self.tables[i - 1],
            )
        })
    }

    /// The same data as an [`InvariantTable`] keyed by chamber representative.
    pub fn to_table(&self, unframed: &BTreeMap<NumericalClass, Rational>) -> InvariantTable {
        InvariantTable {
            unframed: unframed.clone(),
            framed_at: self
                .decomposition
                .chambers
                .iter()
                .zip(&self.tables)
                .map(|(c, t)| (c.representative.clone(), t.clone()))
                .collect(),
        }
    }
}

/// Propagates `asymptotic` (the values in the top chamber) down through
/// every wall of `(0, N]`.
///
/// Every class in `asymptotic` is carried along. Walls are those of the
/// input decomposition together with the critical values of every carried
/// class, so each wall crossed is a genuine wall for whatever class changes
/// there. Classes at one wall are corrected in parallel.
pub fn cross_all_walls(
    decomposition: &ChamberDecomposition,
    asymptotic: &FramedValues,
    unframed: &BTreeMap<NumericalClass, Rational>,
    lie: &LieAlgebra,
) -> Result<WallCrossing> {
    for c in asymptotic.keys() {
        if !lie.framing.is_framed(c) {
            return Err(Error::NotFramed(c.to_string()));
        }
    }
    let mut walls: BTreeSet<Rational> = decomposition.walls.iter().cloned().collect();
    for c in asymptotic.keys() {
        walls.extend(stability::critical_values(c, &decomposition.bound)?);
    }
    let refined = ChamberDecomposition::from_walls(decomposition.gamma.clone(), decomposition.bound.clone(), walls);

    let mut tables = vec![asymptotic.clone()];
    for w in refined.interior_walls().collect::<Vec<_>>().into_iter().rev() {
        let above = tables.last().expect("top table");
        let below = above
            .par_iter()
            .map(|(c, j)| Ok((c.clone(), j + wall_correction(c, w, unframed, above, lie)?)))
            .collect::<Result<FramedValues>>()?;
        tables.push(below);
    }
    tables.reverse();
    Ok(WallCrossing {
        decomposition: refined,
        tables,
    })
}

/// Solves `J_{τ-} = J_{τ+} + correction(J_{τ+})` for `J_{τ+}` at the wall
/// `τ0`.
///
/// Every tuple with `l ≥ 2` has a framed factor of strictly smaller
/// non-framing rank than the class it corrects, so the system is triangular
/// and is solved in increasing rank.
pub fn invert_wall(
    tau0: &Rational,
    minus_side: &FramedValues,
    unframed: &BTreeMap<NumericalClass, Rational>,
    lie: &LieAlgebra,
) -> Result<FramedValues> {
    let mut order: Vec<&NumericalClass> = minus_side.keys().collect();
    order.sort_by_key(|c| (c.total_rank(), (*c).clone()));
    let mut plus = FramedValues::new();
    for c in order {
        let corr = wall_correction(c, tau0, unframed, &plus, lie)?;
        plus.insert(c.clone(), &minus_side[c] - corr);
    }
    Ok(plus)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusVanishing {
    pub table: InvariantTable,
    /// Unframed classes whose value was nonzero and is now zero.
    pub changed: Vec<NumericalClass>,
}

/// On a curve of genus at least one every unframed invariant vanishes.
pub fn enforce_genus_vanishing(table: &InvariantTable, data: &CurveTwistData) -> GenusVanishing {
    if data.genus == 0 {
        return GenusVanishing {
            table: table.clone(),
            changed: Vec::new(),
        };
    }
    let changed = table
        .unframed
        .iter()
        .filter(|(_, j)| !j.is_zero())
        .map(|(c, _)| c.clone())
        .collect();
    let unframed = table.unframed.keys().map(|c| (c.clone(), Rational::zero())).collect();
    GenusVanishing {
        table: InvariantTable {
            unframed,
            framed_at: table.framed_at.clone(),
        },
        changed,
    }
}
