//! A free, framing-truncated model of the Ringel-Hall type algebra.
//!
//! Stack functions are represented by formal symbols: `δ_{τ0}(γ)`,
//! `δ_{τ+}(γ)`, `δ_{τ-}(γ)` for framed classes and `δ(γ)` for unframed ones.
//! Elements are rational combinations of words in those symbols; the product
//! is concatenation, and words whose framing ranks add up past `dim K` are
//! zero. No relation other than the HN decomposition of `δ_{τ0}` is ever
//! imposed, so every identity verified here is a formal consequence of it.
//!
//! Words are plain vectors of generators kept in a `BTreeMap`, which gives a
//! canonical term order for free.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::class::{FramingContext, NumericalClass};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::stability::{self, enumerate_hn, equal_slope_decompositions, Side, SupportSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorKind {
    /// `δ_{τ0}`: semistable at the wall.
    Tau0,
    /// `δ_{τ+}`: semistable just above the wall.
    Plus,
    /// `δ_{τ-}`: semistable just below the wall.
    Minus,
    /// `δ`: unframed, independent of τ.
    Unframed,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Tau0 => "d0",
            GeneratorKind::Plus => "d+",
            GeneratorKind::Minus => "d-",
            GeneratorKind::Unframed => "d",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HallGenerator {
    kind: GeneratorKind,
    class: NumericalClass,
}

impl HallGenerator {
    /// Unframed kind if and only if the class has `v0 = 0`.
    pub fn new(kind: GeneratorKind, class: NumericalClass) -> Result<Self> {
        match (kind, class.is_framed()) {
            (GeneratorKind::Unframed, true) => Err(Error::NotUnframed(class.to_string())),
            (GeneratorKind::Unframed, false) | (_, true) => Ok(Self { kind, class }),
            (_, false) => Err(Error::NotFramed(class.to_string())),
        }
    }

    fn unframed(class: NumericalClass) -> Self {
        debug_assert!(!class.is_framed());
        Self {
            kind: GeneratorKind::Unframed,
            class,
        }
    }

    fn framed(kind: GeneratorKind, class: NumericalClass) -> Self {
        debug_assert!(class.is_framed() && kind != GeneratorKind::Unframed);
        Self { kind, class }
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn class(&self) -> &NumericalClass {
        &self.class
    }
}

impl fmt::Display for HallGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind, self.class)
    }
}

pub type Word = Vec<HallGenerator>;

fn word_framing(word: &[HallGenerator]) -> u64 {
    word.iter().map(|g| u64::from(g.class.v0())).sum()
}

/// A finite rational combination of words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HallElement {
    terms: BTreeMap<Word, Rational>,
}

impl HallElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The empty word, i.e. the unit.
    pub fn one() -> Self {
        Self::from_word(Vec::new(), Rational::one())
    }

    pub fn generator(g: HallGenerator) -> Self {
        Self::from_word(vec![g], Rational::one())
    }

    pub fn from_word(word: Word, coeff: Rational) -> Self {
        let mut out = Self::zero();
        out.add_term(word, coeff);
        out
    }

    pub fn add_term(&mut self, word: Word, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<Word, Rational> {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, word: &[HallGenerator]) -> Rational {
        self.terms.get(word).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, k: &Rational) {
        if k.is_zero() {
            return;
        }
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c * k);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * k)).collect(),
        }
    }

    /// Drops every word whose framing exceeds `dim K`.
    pub fn truncate(&self, ctx: &FramingContext) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| word_framing(w) <= u64::from(ctx.dim_k()))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Sum of the classes of a word's letters, if all words agree.
    pub fn homogeneous_class(&self) -> Option<NumericalClass> {
        let mut classes = self.terms.keys().map(|w| {
            w.iter()
                .map(|g| g.class.clone())
                .reduce(|a, b| &a + &b)
        });
        let first = classes.next()??;
        classes.all(|c| c.as_ref() == Some(&first)).then_some(first)
    }

    /// Replaces letters by elements: `f` returns `Some(replacement)` for
    /// letters to rewrite and `None` to keep the letter.
    pub fn substitute(
        &self,
        ctx: &FramingContext,
        mut f: impl FnMut(&HallGenerator) -> Option<HallElement>,
    ) -> HallElement {
        let mut cache: BTreeMap<HallGenerator, HallElement> = BTreeMap::new();
        let mut out = HallElement::zero();
        for (word, coeff) in &self.terms {
            let mut acc = HallElement::from_word(Vec::new(), coeff.clone());
            for g in word {
                let piece = match cache.get(g) {
                    Some(p) => p.clone(),
                    None => {
                        let p = f(g).unwrap_or_else(|| HallElement::generator(g.clone()));
                        cache.insert(g.clone(), p.clone());
                        p
                    }
                };
                acc = star(&acc, &piece, ctx);
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign(&acc);
        }
        out
    }
}

impl fmt::Display for HallElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if w.is_empty() {
                write!(f, "*1")?;
            }
            for g in w {
                write!(f, "*{g}")?;
            }
        }
        Ok(())
    }
}

/// The Hall product: concatenation of words, with words of total framing
/// above `dim K` set to zero.
pub fn star(x: &HallElement, y: &HallElement, ctx: &FramingContext) -> HallElement {
    let cap = u64::from(ctx.dim_k());
    let mut out = HallElement::zero();
    for (u, a) in &x.terms {
        let fu = word_framing(u);
        if fu > cap {
            continue;
        }
        for (v, b) in &y.terms {
            if fu + word_framing(v) > cap {
                continue;
            }
            let mut w = Vec::with_capacity(u.len() + v.len());
            w.extend_from_slice(u);
            w.extend_from_slice(v);
            out.add_term(w, a * b);
        }
    }
    out
}

/// `x * y - y * x`.
pub fn commutator(x: &HallElement, y: &HallElement, ctx: &FramingContext) -> HallElement {
    star(x, y, ctx).sub(&star(y, x, ctx))
}

fn require_framed(gamma: &NumericalClass, ctx: &FramingContext) -> Result<()> {
    if ctx.is_framed(gamma) {
        Ok(())
    } else {
        Err(Error::NotFramed(gamma.to_string()))
    }
}

/// A word with one framed letter of `kind` placed where the framed class
/// sits in `tuple`, and unframed letters elsewhere.
fn tuple_word(tuple: &[NumericalClass], kind: GeneratorKind) -> Word {
    tuple
        .iter()
        .map(|c| {
            if c.is_framed() {
                HallGenerator::framed(kind, c.clone())
            } else {
                HallGenerator::unframed(c.clone())
            }
        })
        .collect()
}

/// The HN decomposition of `δ_{τ0}(γ)`:
/// `δ_{τ+}(γ) + Σ_{HN+(γ,τ0,2)} δ_{τ+}(γ1) * δ(γ2)` for `Side::Plus`, and
/// `δ_{τ-}(γ) + Σ_{HN-(γ,τ0,2)} δ(γ1) * δ_{τ-}(γ2)` for `Side::Minus`.
pub fn expand_fi1(
    gamma: &NumericalClass,
    side: Side,
    tau0: &Rational,
    support: &SupportSet,
    ctx: &FramingContext,
) -> Result<HallElement> {
    require_framed(gamma, ctx)?;
    let kind = match side {
        Side::Plus => GeneratorKind::Plus,
        Side::Minus => GeneratorKind::Minus,
    };
    let mut out = HallElement::generator(HallGenerator::framed(kind, gamma.clone()));
    for tuple in enumerate_hn(gamma, tau0, 2, support, side)? {
        out.add_term(tuple_word(&tuple, kind), Rational::one());
    }
    Ok(out.truncate(ctx))
}

/// `Σ_{l≥1} (-1)^{l-1} Σ_{HN±(γ,τ0,l)} δ_{τ0}(γ1) * δ(γ2) * ... * δ(γl)`
/// (framed letter first for `Plus`, last for `Minus`); this equals
/// `δ_{τ±}(γ)`.
pub fn expand_fi2(
    gamma: &NumericalClass,
    side: Side,
    tau0: &Rational,
    support: &SupportSet,
    ctx: &FramingContext,
) -> Result<HallElement> {
    require_framed(gamma, ctx)?;
    let mut out = HallElement::zero();
    for tuple in stability::enumerate_hn_all(gamma, tau0, support, side)? {
        let sign = rational::sign_pow(tuple.len() as i64 - 1);
        out.add_term(tuple_word(&tuple, GeneratorKind::Tau0), sign);
    }
    Ok(out.truncate(ctx))
}

/// The right-hand side of the direct wall-crossing identity for δ:
/// `δ_{τ+}(γ) + Σ_{l≥2} (-1)^{l-1} Σ_{HN-(γ,τ0,l)} δ(γ1)*...*δ(γ_{l-2}) * [δ(γ_{l-1}), δ_{τ+}(γl)]`.
pub fn fi3_rhs(
    gamma: &NumericalClass,
    tau0: &Rational,
    support: &SupportSet,
    ctx: &FramingContext,
) -> Result<HallElement> {
    require_framed(gamma, ctx)?;
    let mut out = HallElement::generator(HallGenerator::framed(GeneratorKind::Plus, gamma.clone()));
    for tuple in stability::enumerate_hn_all(gamma, tau0, support, Side::Minus)? {
        let l = tuple.len();
        if l < 2 {
            continue;
        }
        let prefix: Word = tuple[..l - 2].iter().cloned().map(HallGenerator::unframed).collect();
        let inner = commutator(
            &HallElement::generator(HallGenerator::unframed(tuple[l - 2].clone())),
            &HallElement::generator(HallGenerator::framed(GeneratorKind::Plus, tuple[l - 1].clone())),
            ctx,
        );
        let term = star(&HallElement::from_word(prefix, Rational::one()), &inner, ctx);
        out.add_scaled(&term, &rational::sign_pow(l as i64 - 1));
    }
    Ok(out.truncate(ctx))
}

/// `δ_{τ-}(γ)` written in the free symbols `δ_{τ+}(·)`, `δ(·)`: the minus
/// side of [`expand_fi2`] with every `δ_{τ0}` replaced by its plus-side
/// decomposition.
pub fn eliminate_minus(
    gamma: &NumericalClass,
    tau0: &Rational,
    support: &SupportSet,
    ctx: &FramingContext,
) -> Result<HallElement> {
    let base = expand_fi2(gamma, Side::Minus, tau0, support, ctx)?;
    substitute_tau0(&base, Side::Plus, tau0, support, ctx)
}

fn substitute_tau0(
    x: &HallElement,
    side: Side,
    tau0: &Rational,
    support: &SupportSet,
    ctx: &FramingContext,
) -> Result<HallElement> {
    let mut failure = None;
    let out = x.substitute(ctx, |g| {
        if g.kind != GeneratorKind::Tau0 {
            return None;
        }
        match expand_fi1(&g.class, side, tau0, support, ctx) {
            Ok(e) => Some(e),
            Err(e) => {
                failure.get_or_insert(e);
                None
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Outcome of comparing two sides of an identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    /// `lhs - rhs`; zero exactly when the identity holds.
    pub residual: HallElement,
}

impl IdentityCheck {
    fn compare(lhs: &HallElement, rhs: &HallElement) -> Self {
        Self {
            lhs_terms: lhs.term_count(),
            rhs_terms: rhs.term_count(),
            residual: lhs.sub(rhs),
        }
    }

    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiReport {
    /// Plus-side alternating sum, after substituting `δ_{τ0}`, equals `δ_{τ+}(γ)`.
    pub fi2_plus: IdentityCheck,
    /// Minus-side alternating sum, after substituting `δ_{τ0}`, equals `δ_{τ-}(γ)`.
    pub fi2_minus: IdentityCheck,
    /// Elimination of `δ_{τ-}(γ)` agrees with the commutator expansion.
    pub fi3: IdentityCheck,
}

impl FiReport {
    pub fn holds(&self) -> bool {
        self.fi2_plus.holds() && self.fi2_minus.holds() && self.fi3.holds()
    }
}

/// Checks the three HN identities at `(γ, τ0)` in the free algebra on
/// `δ_{τ+}`, `δ_{τ-}`, `δ`.
pub fn verify_fi(
    gamma: &NumericalClass,
    tau0: &Rational,
    support: &SupportSet,
    ctx: &FramingContext,
) -> Result<FiReport> {
    require_framed(gamma, ctx)?;
    let plus = substitute_tau0(&expand_fi2(gamma, Side::Plus, tau0, support, ctx)?, Side::Plus, tau0, support, ctx)?;
    let minus = substitute_tau0(&expand_fi2(gamma, Side::Minus, tau0, support, ctx)?, Side::Minus, tau0, support, ctx)?;
    let elim = eliminate_minus(gamma, tau0, support, ctx)?;
    let rhs3 = fi3_rhs(gamma, tau0, support, ctx)?;
    Ok(FiReport {
        fi2_plus: IdentityCheck::compare(
            &plus,
            &HallElement::generator(HallGenerator::framed(GeneratorKind::Plus, gamma.clone())),
        ),
        fi2_minus: IdentityCheck::compare(
            &minus,
            &HallElement::generator(HallGenerator::framed(GeneratorKind::Minus, gamma.clone())),
        ),
        fi3: IdentityCheck::compare(&elim, &rhs3),
    })
}

/// `ε_τ(γ) = Σ_{l≥1} ((-1)^{l-1}/l) Σ δ_τ(γ1) * ... * δ_τ(γl)` over ordered
/// decompositions with equal τ-slope.
///
/// Unframed letters are `δ(·)` and must come from `support`; for framed `γ`
/// the single framed factor carries `kind`. The `l = 1` term of an unframed
/// class outside the support vanishes, since its `δ` is zero in this model.
pub fn log_stack_function(
    gamma: &NumericalClass,
    kind: GeneratorKind,
    tau: &Rational,
    support: &SupportSet,
    ctx: &FramingContext,
) -> Result<HallElement> {
    let framed = gamma.is_framed();
    match (kind, framed) {
        (GeneratorKind::Unframed, true) => return Err(Error::NotUnframed(gamma.to_string())),
        (GeneratorKind::Unframed, false) => {}
        (_, false) => return Err(Error::NotFramed(gamma.to_string())),
        (_, true) => require_framed(gamma, ctx)?,
    }
    let mut out = HallElement::zero();
    if framed || support.contains(gamma) {
        out.add_term(tuple_word(std::slice::from_ref(gamma), kind), Rational::one());
    }
    for tuple in equal_slope_decompositions(gamma, tau, support)? {
        let l = tuple.len() as i64;
        let weight = rational::sign_pow(l - 1) / rational::int(l);
        out.add_term(tuple_word(&tuple, kind), weight);
    }
    Ok(out.truncate(ctx))
}

/// Values of τ just above and below `τ0` at which no framed class involved
/// in the wall at `τ0` has a strictly semistable decomposition.
pub fn adjacent_parameters(
    gamma: &NumericalClass,
    tau0: &Rational,
    support: &SupportSet,
) -> (Rational, Rational) {
    let closure = support.closure_within(gamma);
    let mut framed: BTreeSet<NumericalClass> = BTreeSet::new();
    framed.insert(gamma.clone());
    for s in closure.classes() {
        if let Some(rest) = gamma.checked_sub(s) {
            framed.insert(rest);
        }
    }
    let mut above: Option<Rational> = None;
    let mut below: Option<Rational> = None;
    for eta in &framed {
        let r = eta.total_rank();
        if r == 0 {
            continue;
        }
        let rq = rational::int(r as i64);
        let d = rational::int(eta.total_degree());
        let v = rational::int(i64::from(eta.v0()));
        for beta in closure.classes() {
            // μ(β) = (d_η + τ v) / r_η  ⇔  τ = (r_η μ(β) - d_η) / v
            let mu = rational::int(beta.total_degree()) / rational::int(beta.total_rank() as i64);
            let t = (&rq * &mu - &d) / &v;
            if !t.is_positive() || &t == tau0 {
                continue;
            }
            let gap = (&t - tau0).abs();
            let slot = if &t > tau0 { &mut above } else { &mut below };
            if slot.as_ref().is_none_or(|g| &gap < g) {
                *slot = Some(gap);
            }
        }
    }
    let two = rational::int(2);
    let up = above.unwrap_or_else(Rational::one) / &two;
    let down_gap = below.map_or(tau0.clone(), |g| g.min(tau0.clone()));
    (tau0 + up, tau0 - down_gap / &two)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogLemmaReport {
    pub tau_plus: Rational,
    pub tau_minus: Rational,
    pub identity: IdentityCheck,
}

impl LogLemmaReport {
    pub fn holds(&self) -> bool {
        self.identity.holds()
    }
}

/// Checks
/// `ε_{τ-}(γ) - ε_{τ+}(γ) = Σ_{l≥2} ((-1)^{l-1}/(l-1)!) Σ_{HN-(γ,τ0,l)} [ε(γ1), [..., [ε(γ_{l-1}), ε_{τ+}(γl)]...]]`
/// with both sides written in the free symbols `δ_{τ+}(·)`, `δ(·)`.
///
/// The unframed factors on the right range over all sums of support classes
/// (the `ε` of such a sum can be nonzero even if its `δ` is not in the
/// support).
pub fn verify_log_lemma(
    gamma: &NumericalClass,
    tau0: &Rational,
    support: &SupportSet,
    ctx: &FramingContext,
) -> Result<LogLemmaReport> {
    require_framed(gamma, ctx)?;
    let (tau_plus, tau_minus) = adjacent_parameters(gamma, tau0, support);

    let eps_minus = log_stack_function(gamma, GeneratorKind::Minus, &tau_minus, support, ctx)?;
    let eps_plus = log_stack_function(gamma, GeneratorKind::Plus, &tau_plus, support, ctx)?;
    let mut failure = None;
    let lhs = eps_minus.sub(&eps_plus).substitute(ctx, |g| {
        if g.kind != GeneratorKind::Minus {
            return None;
        }
        match eliminate_minus(&g.class, tau0, support, ctx) {
            Ok(e) => Some(e),
            Err(e) => {
                failure.get_or_insert(e);
                None
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }

    let closure = support.closure_within(gamma);
    let mut eps_unframed: BTreeMap<NumericalClass, HallElement> = BTreeMap::new();
    let mut rhs = HallElement::zero();
    for tuple in stability::enumerate_hn_all(gamma, tau0, &closure, Side::Minus)? {
        let l = tuple.len();
        if l < 2 {
            continue;
        }
        let mut acc = log_stack_function(&tuple[l - 1], GeneratorKind::Plus, &tau_plus, support, ctx)?;
        for c in tuple[..l - 1].iter().rev() {
            let eps = match eps_unframed.get(c) {
                Some(e) => e.clone(),
                None => {
                    let e = log_stack_function(c, GeneratorKind::Unframed, tau0, support, ctx)?;
                    eps_unframed.insert(c.clone(), e.clone());
                    e
                }
            };
            acc = commutator(&eps, &acc, ctx);
        }
        let weight = rational::sign_pow(l as i64 - 1) / rational::factorial(l - 1);
        rhs.add_scaled(&acc, &weight);
    }

    Ok(LogLemmaReport {
        tau_plus,
        tau_minus,
        identity: IdentityCheck::compare(&lhs, &rhs),
    })
}
