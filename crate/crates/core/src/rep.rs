//! Finite-dimensional modules over the deformed preprojective algebra.
//!
//! A representation assigns a vector space `V_i = Q^{dims[i]}` to every
//! vertex and a matrix `φ_a : V_{t(a)} -> V_{h(a)}` to every arrow of the
//! double. `Hom` and `Ext^1` between two representations are read off the
//! three-term complex
//!
//! ```text
//! C0 = ⊕_{i ∈ Q0} Hom(V_i, W_i) --d0--> C1 = ⊕_{a ∈ Q̄1} Hom(V_ta, W_ha) --d1--> C2 = ⊕_{i ∈ Q0'} Hom(V_i, W_i)
//! ```
//!
//! with `d0(κ)_a = κ_ha φ^V_a - φ^W_a κ_ta` and
//! `d1(γ)_i = Σ_{t(a)=i} (-1)^{|a|} (φ^W_{a*} γ_a + γ_{a*} φ^V_a)`.
//!
//! Basis order: blocks follow vertex (resp. arrow) declaration order, and
//! inside a block `Hom(X, Y)` the entries of the `dim Y x dim X` matrix are
//! listed column-major.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quiver::FramedQuiverShape;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    shape: Arc<FramedQuiverShape>,
    dims: Vec<usize>,
    mats: Vec<Matrix>,
    lambda: Vec<Rational>,
}

/// Outcome of checking the moment map relation vertex by vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    /// `(vertex id, holds)` for every gauged vertex.
    pub vertices: Vec<(String, bool)>,
}

impl RelationReport {
    pub fn holds(&self) -> bool {
        self.vertices.iter().all(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> Vec<String> {
        self.vertices
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(v, _)| v.clone())
            .collect()
    }
}

impl Representation {
    /// `dims` is indexed by vertex, `mats` by doubled arrow, `lambda` by
    /// gauged position. Matrix shapes are checked here; the relation is not.
    pub fn new(
        shape: Arc<FramedQuiverShape>,
        dims: Vec<usize>,
        mats: Vec<Matrix>,
        lambda: Vec<Rational>,
    ) -> Result<Self> {
        let q = shape.quiver();
        if dims.len() != q.vertex_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} dimensions given for {} vertices",
                dims.len(),
                q.vertex_count()
            )));
        }
        if mats.len() != q.arrow_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices given for {} arrows",
                mats.len(),
                q.arrow_count()
            )));
        }
        if lambda.len() != shape.gauged().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} λ values given for {} gauged vertices",
                lambda.len(),
                shape.gauged().len()
            )));
        }
        for (a, m) in mats.iter().enumerate() {
            let want = (dims[q.head(a)], dims[q.tail(a)]);
            if m.shape() != want {
                return Err(Error::DimensionMismatch(format!(
                    "arrow `{}` needs a {}x{} matrix, got {}x{}",
                    q.arrow_id(a),
                    want.0,
                    want.1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Self {
            shape,
            dims,
            mats,
            lambda,
        })
    }

    /// The representation with all matrices zero.
    pub fn zero_maps(shape: Arc<FramedQuiverShape>, dims: Vec<usize>, lambda: Vec<Rational>) -> Result<Self> {
        let q = shape.quiver();
        if dims.len() != q.vertex_count() {
            return Err(Error::DimensionMismatch("dimension vector length".into()));
        }
        let mats = (0..q.arrow_count())
            .map(|a| Matrix::zeros(dims[q.head(a)], dims[q.tail(a)]))
            .collect();
        Self::new(shape, dims, mats, lambda)
    }

    pub fn shape(&self) -> &Arc<FramedQuiverShape> {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self, arrow: usize) -> &Matrix {
        &self.mats[arrow]
    }

    pub fn lambda(&self) -> &[Rational] {
        &self.lambda
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// `Σ_{h(a)=v} (-1)^{|a|} φ_a φ_{a*}` at a vertex.
    pub fn moment_at(&self, v: usize) -> Matrix {
        let q = self.shape.quiver();
        let mut acc = Matrix::zeros(self.dims[v], self.dims[v]);
        for a in q.arrows_with_head(v) {
            let prod = &self.mats[a] * &self.mats[q.reverse(a)];
            acc = if q.parity(a) == 0 {
                &acc + &prod
            } else {
                &acc - &prod
            };
        }
        acc
    }

    pub fn validate_relation(&self) -> RelationReport {
        let q = self.shape.quiver();
        let vertices = self
            .shape
            .gauged()
            .iter()
            .zip(&self.lambda)
            .map(|(&v, l)| {
                let expected = Matrix::identity(self.dims[v]).scale(l);
                (q.vertex_id(v).to_string(), self.moment_at(v) == expected)
            })
            .collect();
        RelationReport { vertices }
    }

    /// `V ⊕ V'` for representations on the same shape and `λ`.
    pub fn direct_sum(&self, other: &Representation) -> Result<Representation> {
        same_setting(self, other)?;
        Representation::new(
            self.shape.clone(),
            self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect(),
            self.mats
                .iter()
                .zip(&other.mats)
                .map(|(a, b)| a.direct_sum(b))
                .collect(),
            self.lambda.clone(),
        )
    }
}

fn same_setting(v: &Representation, w: &Representation) -> Result<()> {
    if v.shape != w.shape {
        return Err(Error::ShapeMismatch("representations live on different quivers".into()));
    }
    if v.lambda != w.lambda {
        return Err(Error::ShapeMismatch("representations use different λ".into()));
    }
    Ok(())
}

/// The differentials of the complex `C(V, W)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomComplex {
    pub d0: Matrix,
    pub d1: Matrix,
}

impl HomComplex {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.d0.cols(), self.d0.rows(), self.d1.rows())
    }

    /// `(dim Hom, dim Ext^1)` from the cohomology in degrees 0 and 1.
    pub fn cohomology_dims(&self) -> (usize, usize) {
        let rank0 = self.d0.rank();
        let rank1 = self.d1.rank();
        let (c0, c1, _) = self.dims();
        (c0 - rank0, c1 - rank1 - rank0)
    }
}

/// Builds `C(V, W)` after checking that both arguments satisfy the moment
/// map relation.
pub fn hom_complex(v: &Representation, w: &Representation) -> Result<HomComplex> {
    same_setting(v, w)?;
    for rep in [v, w] {
        let report = rep.validate_relation();
        if !report.holds() {
            return Err(Error::RelationFailed(report.failures()));
        }
    }
    Ok(hom_complex_unchecked(v, w))
}

/// Builds the differentials without checking the relation; `d1 · d0` then
/// measures how far the inputs are from satisfying it.
pub fn hom_complex_unchecked(v: &Representation, w: &Representation) -> HomComplex {
    let shape = &v.shape;
    let q = shape.quiver();
    let (vd, wd) = (&v.dims, &w.dims);

    let mut off0 = Vec::with_capacity(vd.len());
    let mut acc = 0;
    for i in 0..vd.len() {
        off0.push(acc);
        acc += vd[i] * wd[i];
    }
    let c0 = acc;

    let mut off1 = Vec::with_capacity(q.arrow_count());
    acc = 0;
    for a in 0..q.arrow_count() {
        off1.push(acc);
        acc += vd[q.tail(a)] * wd[q.head(a)];
    }
    let c1 = acc;

    let mut off2 = Vec::with_capacity(shape.gauged().len());
    acc = 0;
    for &i in shape.gauged() {
        off2.push(acc);
        acc += vd[i] * wd[i];
    }
    let c2 = acc;

    // Index of entry (row, col) of a Hom(X, Y) block with `rows = dim Y`.
    let at = |offset: usize, rows: usize, row: usize, col: usize| offset + col * rows + row;

    let mut d0 = Matrix::zeros(c1, c0);
    for a in 0..q.arrow_count() {
        let (t, h) = (q.tail(a), q.head(a));
        let (phi_v, phi_w) = (&v.mats[a], &w.mats[a]);
        for x in 0..wd[h] {
            for y in 0..vd[t] {
                let out = at(off1[a], wd[h], x, y);
                // (κ_h φ^V_a)[x, y] = Σ_k κ_h[x, k] φ^V_a[k, y]
                for k in 0..vd[h] {
                    let c = phi_v.get(k, y);
                    if !c.is_zero() {
                        d0.add_to(out, at(off0[h], wd[h], x, k), c);
                    }
                }
                // -(φ^W_a κ_t)[x, y] = -Σ_k φ^W_a[x, k] κ_t[k, y]
                for k in 0..wd[t] {
                    let c = phi_w.get(x, k);
                    if !c.is_zero() {
                        d0.add_to(out, at(off0[t], wd[t], k, y), &-c);
                    }
                }
            }
        }
    }

    let mut d1 = Matrix::zeros(c2, c1);
    for (pos, &i) in shape.gauged().iter().enumerate() {
        for a in q.arrows_with_tail(i) {
            let rev = q.reverse(a);
            let h = q.head(a);
            let sign = if q.parity(a) == 0 {
                Rational::from_integer(1.into())
            } else {
                Rational::from_integer((-1).into())
            };
            for x in 0..wd[i] {
                for y in 0..vd[i] {
                    let out = at(off2[pos], wd[i], x, y);
                    // (φ^W_{a*} γ_a)[x, y], γ_a ∈ Hom(V_i, W_h)
                    for k in 0..wd[h] {
                        let c = w.mats[rev].get(x, k);
                        if !c.is_zero() {
                            d1.add_to(out, at(off1[a], wd[h], k, y), &(&sign * c));
                        }
                    }
                    // (γ_{a*} φ^V_a)[x, y], γ_{a*} ∈ Hom(V_h, W_i)
                    for k in 0..vd[h] {
                        let c = v.mats[a].get(k, y);
                        if !c.is_zero() {
                            d1.add_to(out, at(off1[rev], wd[i], x, k), &(&sign * c));
                        }
                    }
                }
            }
        }
    }

    HomComplex { d0, d1 }
}

/// `(dim Hom_A(V, W), dim Ext^1_A(V, W))`.
pub fn hom_ext_dims(v: &Representation, w: &Representation) -> Result<(usize, usize)> {
    Ok(hom_complex(v, w)?.cohomology_dims())
}

/// `dim C0 - dim C1 + dim C2`.
pub fn euler_pairing_rep(v: &Representation, w: &Representation) -> Result<i64> {
    same_setting(v, w)?;
    let shape = &v.shape;
    let q = shape.quiver();
    let (vd, wd) = (&v.dims, &w.dims);
    let c0: usize = (0..vd.len()).map(|i| vd[i] * wd[i]).sum();
    let c1: usize = (0..q.arrow_count()).map(|a| vd[q.tail(a)] * wd[q.head(a)]).sum();
    let c2: usize = shape.gauged().iter().map(|&i| vd[i] * wd[i]).sum();
    Ok(c0 as i64 - c1 as i64 + c2 as i64)
}
