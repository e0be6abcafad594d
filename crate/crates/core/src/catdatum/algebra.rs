use super::{BasisRef, CategoryDatum, PointId};
use crate::error::{Error, Result};
use crate::linalg::{zero_vec, FieldSpec, Scalar, Subspace};

/// The category algebra: the direct sum of all hom spaces with composition
/// as multiplication (zero when not composable).
///
/// A basis element of hom(X, Y) lies in `e_Y Γ e_X`, so `g · f = g ∘ f`.
/// Functors become right modules: `F(X) = F · e_X`.
#[derive(Clone, Debug)]
pub struct CategoryAlgebra {
    datum: CategoryDatum,
    /// Start of the hom(src, dst) block at `src * n + dst`; one extra entry at the end.
    offsets: Vec<usize>,
    refs: Vec<BasisRef>,
}

pub fn build_algebra(d: &CategoryDatum) -> CategoryAlgebra {
    let n = d.n_points();
    let mut offsets = Vec::with_capacity(n * n + 1);
    let mut refs = Vec::new();
    for src in 0..n {
        for dst in 0..n {
            offsets.push(refs.len());
            refs.extend((0..d.hom_dim(src, dst)).map(|idx| BasisRef { src, dst, idx }));
        }
    }
    offsets.push(refs.len());
    CategoryAlgebra { datum: d.clone(), offsets, refs }
}

impl CategoryAlgebra {
    pub fn datum(&self) -> &CategoryDatum {
        &self.datum
    }

    pub fn field(&self) -> FieldSpec {
        self.datum.field()
    }

    pub fn dim(&self) -> usize {
        self.refs.len()
    }

    pub fn basis_ref(&self, i: usize) -> BasisRef {
        self.refs[i]
    }

    pub fn offset(&self, src: PointId, dst: PointId) -> usize {
        self.offsets[src * self.datum.n_points() + dst]
    }

    pub fn index_of(&self, r: BasisRef) -> usize {
        self.offset(r.src, r.dst) + r.idx
    }

    /// Embeds an element of hom(src, dst) into the algebra.
    pub fn embed(&self, src: PointId, dst: PointId, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = zero_vec(self.field(), self.dim());
        let o = self.offset(src, dst);
        out[o..o + v.len()].clone_from_slice(v);
        out
    }

    /// The hom(src, dst) component of an algebra element.
    pub fn block<'a>(&self, v: &'a [Scalar], src: PointId, dst: PointId) -> &'a [Scalar] {
        let o = self.offset(src, dst);
        &v[o..o + self.datum.hom_dim(src, dst)]
    }

    pub fn idempotent(&self, x: PointId) -> Vec<Scalar> {
        self.embed(x, x, self.datum.identity(x))
    }

    pub fn one(&self) -> Vec<Scalar> {
        let f = self.field();
        let mut out = zero_vec(f, self.dim());
        for x in 0..self.datum.n_points() {
            for (a, b) in out.iter_mut().zip(self.idempotent(x)) {
                *a = f.add(a, &b);
            }
        }
        out
    }

    pub fn unit(&self, i: usize) -> Vec<Scalar> {
        let mut v = zero_vec(self.field(), self.dim());
        v[i] = self.field().one();
        v
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let f = self.field();
        let n = self.datum.n_points();
        let mut out = zero_vec(f, self.dim());
        for y in 0..n {
            for z in 0..n {
                let g = self.block(a, y, z);
                if g.iter().all(|s| f.is_zero(s)) {
                    continue;
                }
                for x in 0..n {
                    let h = self.block(b, x, y);
                    if h.iter().all(|s| f.is_zero(s)) {
                        continue;
                    }
                    let c = self.datum.compose(x, y, z, g, h);
                    let o = self.offset(x, z);
                    for (k, s) in c.iter().enumerate() {
                        if !f.is_zero(s) {
                            out[o + k] = f.add(&out[o + k], s);
                        }
                    }
                }
            }
        }
        out
    }

    /// `basis_i · v`.
    pub fn left_mul_basis(&self, i: usize, v: &[Scalar]) -> Vec<Scalar> {
        let f = self.field();
        let r = self.refs[i];
        let (y, z) = (r.src, r.dst);
        let mut out = zero_vec(f, self.dim());
        for x in 0..self.datum.n_points() {
            let o_in = self.offset(x, y);
            let o_out = self.offset(x, z);
            for fi in 0..self.datum.hom_dim(x, y) {
                let c = &v[o_in + fi];
                if f.is_zero(c) {
                    continue;
                }
                for (k, s) in self.datum.compose_basis(x, y, z, r.idx, fi) {
                    f.mul_add_assign(&mut out[o_out + k], c, s);
                }
            }
        }
        out
    }

    /// `v · basis_i`.
    pub fn right_mul_basis(&self, v: &[Scalar], i: usize) -> Vec<Scalar> {
        let f = self.field();
        let r = self.refs[i];
        let (x, y) = (r.src, r.dst);
        let mut out = zero_vec(f, self.dim());
        for z in 0..self.datum.n_points() {
            let o_in = self.offset(y, z);
            let o_out = self.offset(x, z);
            for gi in 0..self.datum.hom_dim(y, z) {
                let c = &v[o_in + gi];
                if f.is_zero(c) {
                    continue;
                }
                for (k, s) in self.datum.compose_basis(x, y, z, gi, r.idx) {
                    f.mul_add_assign(&mut out[o_out + k], c, s);
                }
            }
        }
        out
    }
}

/// The hom(w, z) block of the ideal generated by `{e_X : X ∈ pts}`: the
/// span of composites `w -> X -> z` with X in `pts`.
pub fn ideal_block(d: &CategoryDatum, pts: &[PointId], w: PointId, z: PointId) -> Subspace {
    let f = d.field();
    let dim = d.hom_dim(w, z);
    let mut block = Subspace::new(f, dim);
    for &x in pts {
        for g in 0..d.hom_dim(x, z) {
            for h in 0..d.hom_dim(w, x) {
                if block.dim() == dim {
                    return block;
                }
                let mut v = zero_vec(f, dim);
                for (k, c) in d.compose_basis(w, x, z, g, h) {
                    v[*k] = c.clone();
                }
                block.insert(&v);
            }
        }
    }
    block
}

/// The two-sided ideal generated by `{e_X : X ∈ pts}`. Since `a e_X b` is a
/// composite through X, the ideal is the sum of its hom blocks.
pub fn idempotent_ideal(alg: &CategoryAlgebra, pts: &[PointId]) -> Result<Subspace> {
    let n = alg.datum.n_points();
    if let Some(&bad) = pts.iter().find(|&&x| x >= n) {
        return Err(Error::input(format!("point index {bad} out of range")));
    }
    let mut ideal = Subspace::new(alg.field(), alg.dim());
    for w in 0..n {
        for z in 0..n {
            for v in ideal_block(&alg.datum, pts, w, z).basis() {
                ideal.insert(&alg.embed(w, z, v));
            }
        }
    }
    Ok(ideal)
}
