//! Slope stability on the ray `τ > 0`: slopes, critical values, chambers and
//! the class-level Harder-Narasimhan index sets.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::class::NumericalClass;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A τ-slope: an exact rational, or `+∞` for classes with no gauged rank.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slope {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(q) => write!(f, "{q}"),
            Slope::Infinite => write!(f, "+inf"),
        }
    }
}

fn check_tau(tau: &Rational) -> Result<()> {
    if tau.is_positive() {
        Ok(())
    } else {
        Err(Error::NonPositiveTau(tau.to_string()))
    }
}

/// `(d + τ v0) / r` with `r`, `d` summed over gauged vertices.
pub fn slope(class: &NumericalClass, tau: &Rational) -> Result<Slope> {
    check_tau(tau)?;
    Ok(slope_unchecked(class, tau))
}

pub(crate) fn slope_unchecked(class: &NumericalClass, tau: &Rational) -> Slope {
    let r = class.total_rank();
    if r == 0 {
        return Slope::Infinite;
    }
    let num = Rational::from_integer(class.total_degree().into())
        + tau * Rational::from_integer(class.v0().into());
    Slope::Finite(num / Rational::from_integer(r.into()))
}

/// All `τ ∈ (0, N]` at which a class with framing can have strictly
/// semistable objects, i.e. the values
/// `(r d' - r' d) / (r' v)` and `(r' d - r d') / ((r - r') v)` for
/// `1 ≤ r' ≤ r - 1` and integer `d'`.
///
/// For each `r'` both families are arithmetic progressions in `d'`, so the
/// admissible `d'` form an explicit integer interval and the scan below is
/// exhaustive.
pub fn critical_values(class: &NumericalClass, bound: &Rational) -> Result<Vec<Rational>> {
    if !class.is_framed() {
        return Err(Error::NotFramed(class.to_string()));
    }
    check_tau(bound)?;
    let r = class.total_rank();
    let d = Rational::from_integer(class.total_degree().into());
    let v = Rational::from_integer(class.v0().into());
    let rq = Rational::from_integer(r.into());
    let mut out = BTreeSet::new();
    for rp in 1..r {
        let rpq = Rational::from_integer(rp.into());
        let rest = Rational::from_integer((r - rp).into());

        // Family 1: τ = (r d' - r' d) / (r' v) ∈ (0, N]
        //   ⇔ r' d / r < d' ≤ (N r' v + r' d) / r
        let lo = floor(&(&rpq * &d / &rq)) + BigInt::one();
        let hi = floor(&((bound * &rpq * &v + &rpq * &d) / &rq));
        let mut dp = lo;
        while dp <= hi {
            let dpq = Rational::from_integer(dp.clone());
            out.insert((&rq * &dpq - &rpq * &d) / (&rpq * &v));
            dp += 1;
        }

        // Family 2: τ = (r' d - r d') / ((r - r') v) ∈ (0, N]
        //   ⇔ (r' d - N (r - r') v) / r ≤ d' < r' d / r
        let lo = ceil(&((&rpq * &d - bound * &rest * &v) / &rq));
        let hi = ceil(&(&rpq * &d / &rq)) - BigInt::one();
        let mut dp = lo;
        while dp <= hi {
            let dpq = Rational::from_integer(dp.clone());
            out.insert((&rpq * &d - &rq * &dpq) / (&rest * &v));
            dp += 1;
        }
    }
    Ok(out.into_iter().collect())
}

fn floor(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

fn ceil(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// A maximal wall-free interval of `(0, N]` with a rational point inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub lower: Rational,
    pub upper: Rational,
    pub representative: Rational,
}

impl Chamber {
    /// Whether `τ` lies strictly inside `(lower, upper)`; the upper end is
    /// included for the top chamber when it is not itself a wall.
    pub fn contains(&self, tau: &Rational) -> bool {
        tau > &self.lower && tau <= &self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChamberDecomposition {
    pub gamma: NumericalClass,
    pub bound: Rational,
    pub walls: Vec<Rational>,
    /// Ordered from small τ to large τ.
    pub chambers: Vec<Chamber>,
}

impl ChamberDecomposition {
    /// Chambers of `(0, N]` cut out by the given walls. Walls outside
    /// `(0, N]` are ignored and duplicates merged.
    pub fn from_walls(gamma: NumericalClass, bound: Rational, walls: impl IntoIterator<Item = Rational>) -> Self {
        let walls: Vec<Rational> = walls
            .into_iter()
            .filter(|w| w.is_positive() && w <= &bound)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let two = rational::int(2);
        let mut chambers = Vec::with_capacity(walls.len() + 1);
        let mut lower = Rational::zero();
        for w in &walls {
            chambers.push(Chamber {
                lower: lower.clone(),
                upper: w.clone(),
                representative: (&lower + w) / &two,
            });
            lower = w.clone();
        }
        if lower < bound {
            chambers.push(Chamber {
                representative: (&lower + &bound) / &two,
                lower,
                upper: bound.clone(),
            });
        }
        Self {
            gamma,
            bound,
            walls,
            chambers,
        }
    }

    /// Walls that separate two chambers (a wall at `N` itself does not).
    pub fn interior_walls(&self) -> impl Iterator<Item = &Rational> {
        self.chambers.iter().skip(1).map(|c| &c.lower)
    }

    pub fn top(&self) -> &Chamber {
        self.chambers.last().expect("at least one chamber")
    }

    pub fn chamber_of(&self, tau: &Rational) -> Option<&Chamber> {
        self.chambers.iter().find(|c| c.contains(tau) && !self.walls.contains(tau))
    }
}

pub fn chamber_decomposition(class: &NumericalClass, bound: &Rational) -> Result<ChamberDecomposition> {
    let walls = critical_values(class, bound)?;
    Ok(ChamberDecomposition::from_walls(class.clone(), bound.clone(), walls))
}

/// The unframed classes allowed as Harder-Narasimhan factors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SupportSet {
    classes: BTreeSet<NumericalClass>,
}

impl SupportSet {
    pub fn new(classes: impl IntoIterator<Item = NumericalClass>) -> Result<Self> {
        let classes: BTreeSet<NumericalClass> = classes.into_iter().collect();
        for c in &classes {
            if c.is_framed() {
                return Err(Error::NotUnframed(c.to_string()));
            }
            if c.total_rank() == 0 {
                return Err(Error::ZeroRankSupport(c.to_string()));
            }
        }
        Ok(Self { classes })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn classes(&self) -> &BTreeSet<NumericalClass> {
        &self.classes
    }

    pub fn contains(&self, c: &NumericalClass) -> bool {
        self.classes.contains(c)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Nonempty sums of support classes (with repetition) whose ranks fit
    /// inside `limit` at every vertex.
    pub fn closure_within(&self, limit: &NumericalClass) -> SupportSet {
        let mut seen: BTreeSet<NumericalClass> = BTreeSet::new();
        let mut frontier: Vec<NumericalClass> = self
            .classes
            .iter()
            .filter(|c| c.ranks_within(limit))
            .cloned()
            .collect();
        while let Some(c) = frontier.pop() {
            if !seen.insert(c.clone()) {
                continue;
            }
            for b in &self.classes {
                let s = &c + b;
                if s.ranks_within(limit) && !seen.contains(&s) {
                    frontier.push(s);
                }
            }
        }
        SupportSet { classes: seen }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// Framed factor first.
    Plus,
    /// Framed factor last.
    Minus,
}

/// Ordered sequences of `len` support classes, each with slope `mu`, whose
/// running sum stays inside `limit`.
fn unframed_sequences(
    candidates: &[NumericalClass],
    len: usize,
    limit: &NumericalClass,
) -> Vec<(Vec<NumericalClass>, NumericalClass)> {
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(len);
    fn go(
        candidates: &[NumericalClass],
        len: usize,
        limit: &NumericalClass,
        sum: NumericalClass,
        stack: &mut Vec<NumericalClass>,
        out: &mut Vec<(Vec<NumericalClass>, NumericalClass)>,
    ) {
        if stack.len() == len {
            out.push((stack.clone(), sum));
            return;
        }
        for c in candidates {
            let next = &sum + c;
            if next.ranks_within(limit) {
                stack.push(c.clone());
                go(candidates, len, limit, next, stack, out);
                stack.pop();
            }
        }
    }
    go(candidates, len, limit, NumericalClass::zero(limit.arity()), &mut stack, &mut out);
    out
}

fn same_slope_candidates(support: &SupportSet, target: &Slope, limit: &NumericalClass, tau: &Rational) -> Vec<NumericalClass> {
    support
        .classes
        .iter()
        .filter(|b| b.ranks_within(limit) && &slope_unchecked(b, tau) == target)
        .cloned()
        .collect()
}

/// `HN_±(γ, τ0, l)`: ordered `l`-tuples summing to `γ`, all of τ0-slope
/// `μ_{τ0}(γ)`, with the framed factor first (`Plus`) or last (`Minus`).
/// Unframed factors come from `support`; the framed factor is what remains.
/// The result is sorted in canonical class order.
pub fn enumerate_hn(
    gamma: &NumericalClass,
    tau0: &Rational,
    len: usize,
    support: &SupportSet,
    side: Side,
) -> Result<Vec<Vec<NumericalClass>>> {
    check_tau(tau0)?;
    if len == 0 {
        return Err(Error::ZeroLength);
    }
    if !gamma.is_framed() {
        return Err(Error::NotFramed(gamma.to_string()));
    }
    if len == 1 {
        return Ok(vec![vec![gamma.clone()]]);
    }
    let mu = slope_unchecked(gamma, tau0);
    let candidates = same_slope_candidates(support, &mu, gamma, tau0);
    let mut out: Vec<Vec<NumericalClass>> = unframed_sequences(&candidates, len - 1, gamma)
        .into_iter()
        .filter_map(|(seq, sum)| {
            let rest = gamma.checked_sub(&sum)?;
            if slope_unchecked(&rest, tau0) != mu {
                return None;
            }
            let mut tuple = Vec::with_capacity(len);
            match side {
                Side::Plus => {
                    tuple.push(rest);
                    tuple.extend(seq);
                }
                Side::Minus => {
                    tuple.extend(seq);
                    tuple.push(rest);
                }
            }
            Some(tuple)
        })
        .collect();
    out.sort();
    Ok(out)
}

/// All `HN_±(γ, τ0, l)` for `l = 1, 2, ...` until the sets run out.
pub fn enumerate_hn_all(
    gamma: &NumericalClass,
    tau0: &Rational,
    support: &SupportSet,
    side: Side,
) -> Result<Vec<Vec<NumericalClass>>> {
    let mut all = Vec::new();
    for len in 1.. {
        let level = enumerate_hn(gamma, tau0, len, support, side)?;
        if level.is_empty() {
            break;
        }
        all.extend(level);
        // Each unframed factor carries positive rank, so l ≤ rank(γ) + 1.
        if len as u64 > gamma.total_rank() + 1 {
            break;
        }
    }
    Ok(all)
}

/// Ordered decompositions `γ = γ_1 + ... + γ_l` with `l ≥ 2` and all
/// τ-slopes equal to `μ_τ(γ)`. Unframed factors come from `support`; for a
/// framed `γ` exactly one factor is framed (the remainder) and it may sit in
/// any position.
pub fn equal_slope_decompositions(
    gamma: &NumericalClass,
    tau: &Rational,
    support: &SupportSet,
) -> Result<Vec<Vec<NumericalClass>>> {
    check_tau(tau)?;
    let mu = slope_unchecked(gamma, tau);
    let candidates = same_slope_candidates(support, &mu, gamma, tau);
    let max_len = gamma.total_rank() as usize;
    let mut out = Vec::new();
    if gamma.is_framed() {
        for k in 1..=max_len {
            for (seq, sum) in unframed_sequences(&candidates, k, gamma) {
                let Some(rest) = gamma.checked_sub(&sum) else { continue };
                if slope_unchecked(&rest, tau) != mu {
                    continue;
                }
                for pos in 0..=k {
                    let mut tuple = seq.clone();
                    tuple.insert(pos, rest.clone());
                    out.push(tuple);
                }
            }
        }
    } else {
        for k in 2..=max_len {
            for (seq, sum) in unframed_sequences(&candidates, k, gamma) {
                if &sum == gamma {
                    out.push(seq);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn class(v0: u32, r: u32, d: i64) -> NumericalClass {
        NumericalClass::from_pairs(v0, &[(r, d)])
    }

    /// Brute-force scan over d' in a window; the families' closed forms
    /// written out independently of the progression bounds.
    fn scan(r: u64, d: i64, v: u32, n: &Rational, window: i64) -> Vec<Rational> {
        let mut out = BTreeSet::new();
        for rp in 1..r as i64 {
            for dp in -window..=window {
                let r = r as i64;
                let v = i64::from(v);
                for t in [frac(r * dp - rp * d, rp * v), frac(rp * d - r * dp, (r - rp) * v)] {
                    if t > int(0) && &t <= n {
                        out.insert(t);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    #[test]
    fn slope_examples() {
        let g = NumericalClass::from_pairs(1, &[(1, 1), (1, 2)]);
        assert_eq!(slope(&g, &int(4)).unwrap(), Slope::Finite(frac(7, 2)));
        let u = class(0, 2, 3);
        assert_eq!(slope(&u, &int(1)).unwrap(), slope(&u, &int(100)).unwrap());
        assert_eq!(slope(&class(1, 0, 0), &int(1)).unwrap(), Slope::Infinite);
        assert!(slope(&g, &int(0)).is_err());
        assert!(Slope::Finite(int(1_000_000)) < Slope::Infinite);
    }

    #[test]
    fn critical_value_examples() {
        assert_eq!(critical_values(&class(1, 2, 1), &int(5)).unwrap(), vec![int(1), int(3), int(5)]);
        assert_eq!(scan(2, 1, 1, &int(5), 10), vec![int(1), int(3), int(5)]);
        assert_eq!(critical_values(&class(1, 3, 0), &int(2)).unwrap(), vec![frac(3, 2)]);
        assert_eq!(scan(3, 0, 1, &int(2), 10), vec![frac(3, 2)]);
        assert!(critical_values(&class(1, 1, 7), &int(9)).unwrap().is_empty());
        assert!(critical_values(&class(0, 3, 0), &int(2)).is_err());
        assert!(critical_values(&class(1, 3, 0), &int(0)).is_err());
    }

    #[test]
    fn chamber_examples() {
        let dec = chamber_decomposition(&class(1, 2, 1), &int(5)).unwrap();
        assert_eq!(dec.walls, vec![int(1), int(3), int(5)]);
        let reps: Vec<_> = dec.chambers.iter().map(|c| c.representative.clone()).collect();
        assert_eq!(reps, vec![frac(1, 2), int(2), int(4)]);
        assert_eq!(dec.interior_walls().cloned().collect::<Vec<_>>(), vec![int(1), int(3)]);

        let flat = chamber_decomposition(&class(1, 1, 0), &int(6)).unwrap();
        assert_eq!(flat.chambers.len(), 1);
        assert_eq!(flat.chambers[0].representative, int(3));

        let below = chamber_decomposition(&class(1, 2, 1), &frac(1, 2)).unwrap();
        assert!(below.walls.is_empty());
        assert_eq!(below.chambers.len(), 1);
        assert_eq!(below.chambers[0].representative, frac(1, 4));
    }

    #[test]
    fn hn_examples() {
        let g = class(1, 2, 1);
        let beta = class(0, 1, 2);
        let support = SupportSet::new([beta.clone()]).unwrap();
        // μ_1(g) = (1 + 1)/2 = 1, μ(β) = 2: no match at τ0 = 1.
        assert!(enumerate_hn(&g, &int(1), 2, &support, Side::Plus).unwrap().is_empty());
        // μ_3(g) = (1 + 3)/2 = 2 = μ(β).
        let minus = enumerate_hn(&g, &int(3), 2, &support, Side::Minus).unwrap();
        assert_eq!(minus, vec![vec![beta.clone(), class(1, 1, -1)]]);
        let plus = enumerate_hn(&g, &int(3), 2, &support, Side::Plus).unwrap();
        assert_eq!(plus, vec![vec![class(1, 1, -1), beta]]);
        assert_eq!(enumerate_hn(&g, &int(3), 1, &support, Side::Plus).unwrap(), vec![vec![g.clone()]]);
        assert_eq!(enumerate_hn(&g, &int(3), 0, &support, Side::Plus), Err(Error::ZeroLength));
        // Remainder of zero rank has infinite slope and is excluded.
        assert!(enumerate_hn(&g, &int(3), 3, &support, Side::Plus).unwrap().is_empty());
    }

    #[test]
    fn support_validation() {
        assert!(SupportSet::new([class(1, 1, 0)]).is_err());
        assert!(SupportSet::new([class(0, 0, 3)]).is_err());
    }

    #[test]
    fn closure_and_decompositions() {
        let beta = class(0, 1, 1);
        let support = SupportSet::new([beta.clone(), beta.scaled(2)]).unwrap();
        let closure = support.closure_within(&class(1, 3, 0));
        assert_eq!(closure.len(), 3);
        let decs = equal_slope_decompositions(&beta.scaled(2), &int(1), &support).unwrap();
        assert_eq!(decs, vec![vec![beta.clone(), beta.clone()]]);

        // Framed class whose τ-slope matches β at τ = 1: γ = (1 | 2, 1).
        let g = class(1, 2, 1);
        let decs = equal_slope_decompositions(&g, &int(1), &SupportSet::new([beta.clone()]).unwrap()).unwrap();
        let rest = class(1, 1, 0);
        assert_eq!(decs, vec![vec![beta.clone(), rest.clone()], vec![rest, beta]]);
    }

    proptest! {
        #[test]
        fn critical_values_match_scan(r in 1u64..6, d in -6i64..7, v in 1u32..3, num in 1i64..12, den in 1i64..4) {
            let n = frac(num, den);
            let g = NumericalClass::from_pairs(v, &[(r as u32, d)]);
            let fast = critical_values(&g, &n).unwrap();
            // Window comfortably covers every admissible d'.
            let slow = scan(r, d, v, &n, 6 * (num + 10));
            prop_assert_eq!(&fast, &slow);
            let dec = ChamberDecomposition::from_walls(g, n, fast.clone());
            for c in &dec.chambers {
                prop_assert!(c.lower < c.representative && c.representative < c.upper);
                prop_assert!(!fast.contains(&c.representative));
            }
        }

        #[test]
        fn hn_tuples_are_balanced(
            r in 2u32..5,
            d in -3i64..4,
            picks in proptest::collection::vec((1u32..3, -3i64..4), 1..4),
            tau_num in 1i64..9,
        ) {
            let g = class(1, r, d);
            let tau = frac(tau_num, 2);
            let support = SupportSet::new(picks.iter().map(|&(r, d)| class(0, r, d))).unwrap();
            for len in 1..=4usize {
                let minus = enumerate_hn(&g, &tau, len, &support, Side::Minus).unwrap();
                let plus = enumerate_hn(&g, &tau, len, &support, Side::Plus).unwrap();
                let mu = slope(&g, &tau).unwrap();
                for t in &minus {
                    let sum = t.iter().fold(NumericalClass::zero(1), |a, b| &a + b);
                    prop_assert_eq!(&sum, &g);
                    for f in t {
                        prop_assert_eq!(slope(f, &tau).unwrap(), mu.clone());
                    }
                    prop_assert!(t.last().unwrap().is_framed());
                }
                let mut mirrored: Vec<Vec<NumericalClass>> = minus
                    .iter()
                    .map(|t| {
                        let (framed, rest) = t.split_last().unwrap();
                        let mut m = vec![framed.clone()];
                        m.extend(rest.iter().rev().cloned());
                        m
                    })
                    .collect();
                mirrored.sort();
                prop_assert_eq!(mirrored, plus);
            }
        }

        #[test]
        fn larger_support_keeps_tuples(
            picks in proptest::collection::vec((1u32..3, -3i64..4), 1..4),
            extra in (1u32..3, -3i64..4),
        ) {
            let g = class(1, 3, 1);
            let tau = int(2);
            let small = SupportSet::new(picks.iter().map(|&(r, d)| class(0, r, d))).unwrap();
            let big = SupportSet::new(
                picks.iter().chain(std::iter::once(&extra)).map(|&(r, d)| class(0, r, d)),
            ).unwrap();
            for len in 2..=3usize {
                let a = enumerate_hn(&g, &tau, len, &small, Side::Plus).unwrap();
                let b = enumerate_hn(&g, &tau, len, &big, Side::Plus).unwrap();
                prop_assert!(a.iter().all(|t| b.contains(t)));
            }
        }
    }
}
