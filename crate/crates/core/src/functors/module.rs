use std::collections::BTreeSet;

use rand::Rng;

use super::FpFunctor;
use crate::catdatum::{hom_matrix, ideal_block, precompose_matrix, AddMorphism, AddObject, BasisRef, CategoryAlgebra, CategoryDatum, PointId};
use crate::error::Result;
use crate::linalg::{axpy, ExactMatrix, FieldSpec, Scalar, Subspace};

/// A finite-dimensional right module over the category algebra, graded by
/// points: M = ⊕_x M·e_x. A basis element φ: src -> dst acts by a block
/// M(dst) -> M(src); module vectors are columns, `m ↦ m · φ`.
#[derive(Clone, Debug)]
pub struct RightModule {
    field: FieldSpec,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    refs: Vec<BasisRef>,
    actions: Vec<ExactMatrix>,
}

/// F(x) = Hom(x, B) / image, with representatives at the non-pivot columns
/// of the image.
struct Slice {
    image: Subspace,
    free: Vec<usize>,
}

impl Slice {
    fn coords(&self, v: &[Scalar]) -> Vec<Scalar> {
        let r = self.image.reduce(v);
        self.free.iter().map(|&j| r[j].clone()).collect()
    }
}

fn offsets_of(dims: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len() + 1);
    let mut at = 0;
    for &k in dims {
        out.push(at);
        at += k;
    }
    out.push(at);
    out
}

impl RightModule {
    /// The module ⊕_x F(x) of `f = coker Hom(-, g)`.
    pub fn from_functor(alg: &CategoryAlgebra, f: &FpFunctor) -> Result<Self> {
        let d = alg.datum();
        let field = d.field();
        let g = &f.presentation;
        let n = d.n_points();
        let mut slices = Vec::with_capacity(n);
        for x in 0..n {
            let h = hom_matrix(d, x, g)?;
            let cols: Vec<_> = (0..h.cols()).map(|c| h.column(c)).collect();
            let image = Subspace::spanned_by(field, h.rows(), &cols);
            let pivots: BTreeSet<usize> = image.pivots().into_iter().collect();
            let free = (0..h.rows()).filter(|j| !pivots.contains(j)).collect();
            slices.push(Slice { image, free });
        }
        let dims: Vec<usize> = slices.iter().map(|s| s.free.len()).collect();
        let refs: Vec<BasisRef> = (0..alg.dim()).map(|i| alg.basis_ref(i)).collect();
        let mut actions = Vec::with_capacity(refs.len());
        for r in &refs {
            // φ: src -> dst acts F(dst) -> F(src) by precomposition.
            let (from, to) = (&slices[r.dst], &slices[r.src]);
            let mut m = ExactMatrix::zeros(field, to.free.len(), from.free.len());
            if !from.free.is_empty() && !to.free.is_empty() {
                let phi = d.unit_vector(r.src, r.dst, r.idx);
                let pre = precompose_matrix(d, r.src, r.dst, &phi, &g.target);
                for (a, &j) in from.free.iter().enumerate() {
                    for (b, v) in to.coords(&pre.column(j)).into_iter().enumerate() {
                        m.set(b, a, v);
                    }
                }
            }
            actions.push(m);
        }
        Ok(RightModule { field, offsets: offsets_of(&dims), dims, refs, actions })
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().expect("offsets end with the total")
    }

    /// dim M(x).
    pub fn dim_at(&self, x: PointId) -> usize {
        self.dims[x]
    }

    fn component<'a>(&self, v: &'a [Scalar], x: PointId) -> &'a [Scalar] {
        &v[self.offsets[x]..self.offsets[x + 1]]
    }

    /// The block M(dst) -> M(src) of an element supported on hom(src, dst),
    /// given by its coefficients on the basis elements of that block.
    fn block_map(&self, first: usize, coeffs: &[Scalar]) -> ExactMatrix {
        let f = self.field;
        let r = self.refs[first];
        let mut m = ExactMatrix::zeros(f, self.dims[r.src], self.dims[r.dst]);
        if m.rows() == 0 || m.cols() == 0 {
            return m;
        }
        for (k, c) in coeffs.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let a = &self.actions[first + k];
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let mut v = m.get(i, j).clone();
                    f.mul_add_assign(&mut v, c, a.get(i, j));
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    /// Nonzero hom blocks of an algebra element: (first basis index, coefficients).
    fn blocks_of<'a>(&self, a: &'a [Scalar]) -> Vec<(usize, &'a [Scalar])> {
        let f = self.field;
        let mut out = Vec::new();
        let mut i = 0;
        while i < a.len() {
            let r = self.refs[i];
            let mut end = i;
            while end < a.len() && self.refs[end].src == r.src && self.refs[end].dst == r.dst {
                end += 1;
            }
            if a[i..end].iter().any(|c| !f.is_zero(c)) {
                out.push((i, &a[i..end]));
            }
            i = end;
        }
        out
    }

    /// `v · a` for an algebra element `a`.
    pub fn act(&self, v: &[Scalar], a: &[Scalar]) -> Vec<Scalar> {
        let f = self.field;
        let mut out = vec![f.zero(); self.dim()];
        for (first, coeffs) in self.blocks_of(a) {
            let r = self.refs[first];
            let w = self.block_map(first, coeffs).mul_vec(self.component(v, r.dst));
            let o = self.offsets[r.src];
            axpy(f, &mut out[o..o + w.len()], &f.one(), &w);
        }
        out
    }

    #[cfg(test)]
    fn unit(&self, k: usize) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.dim()];
        v[k] = self.field.one();
        v
    }

    /// The subspace M·J.
    pub fn product_span(&self, ideal: &Subspace) -> Subspace {
        let f = self.field;
        let mut s = Subspace::new(f, self.dim());
        for a in ideal.basis() {
            let blocks: Vec<_> = self.blocks_of(a).into_iter().map(|(first, c)| (self.refs[first], self.block_map(first, c))).collect();
            for dst in 0..self.dims.len() {
                for j in 0..self.dims[dst] {
                    let mut v = vec![f.zero(); self.dim()];
                    for (r, m) in blocks.iter().filter(|(r, _)| r.dst == dst) {
                        let o = self.offsets[r.src];
                        axpy(f, &mut v[o..o + m.rows()], &f.one(), &m.column(j));
                    }
                    s.insert(&v);
                }
            }
        }
        s
    }

    pub fn annihilated_by(&self, ideal: &Subspace) -> bool {
        ideal.basis().iter().all(|a| self.blocks_of(a).into_iter().all(|(first, c)| self.block_map(first, c).is_zero()))
    }

    pub fn generated_by(&self, ideal: &Subspace) -> bool {
        self.product_span(ideal).dim() == self.dim()
    }

    /// M·J = 0 for the ideal J generated by the idempotents of `pts`,
    /// checked on the blocks of J.
    pub fn annihilated_by_points(&self, d: &CategoryDatum, pts: &[PointId]) -> bool {
        let live: Vec<PointId> = (0..self.dims.len()).filter(|&x| self.dims[x] > 0).collect();
        live.iter().all(|&w| {
            live.iter().all(|&z| ideal_block(d, pts, w, z).basis().iter().all(|phi| self.induced(w, z, phi).is_zero()))
        })
    }

    /// F(φ): M(dst) -> M(src) for φ in hom(src, dst).
    fn induced(&self, src: PointId, dst: PointId, phi: &[Scalar]) -> ExactMatrix {
        let first = self.refs.partition_point(|r| (r.src, r.dst) < (src, dst));
        self.block_map(first, phi)
    }

    /// The submodule generated by `gens`.
    pub fn submodule(&self, gens: &[Vec<Scalar>]) -> Subspace {
        let f = self.field;
        let mut s = Subspace::new(f, self.dim());
        let mut queue = Vec::new();
        for v in gens {
            if s.insert(v) {
                queue.push(v.clone());
            }
        }
        while let Some(v) = queue.pop() {
            for (r, m) in self.refs.iter().zip(&self.actions) {
                let c = self.component(&v, r.dst);
                if m.rows() == 0 || c.iter().all(|x| f.is_zero(x)) {
                    continue;
                }
                let mut w = vec![f.zero(); self.dim()];
                let o = self.offsets[r.src];
                w[o..o + m.rows()].clone_from_slice(&m.mul_vec(c));
                if s.insert(&w) {
                    queue.push(w);
                }
            }
        }
        s
    }

    /// Per-point pieces of a submodule: M·e_x is spanned by the projections.
    fn graded_pieces(&self, sub: &Subspace) -> Vec<Subspace> {
        (0..self.dims.len())
            .map(|x| {
                let parts: Vec<Vec<Scalar>> = sub.basis().iter().map(|v| self.component(v, x).to_vec()).collect();
                Subspace::spanned_by(self.field, self.dims[x], &parts)
            })
            .collect()
    }

    /// The module structure on a submodule, with each M(x) in the basis of
    /// its graded piece.
    pub fn restrict(&self, sub: &Subspace) -> Result<RightModule> {
        let pieces = self.graded_pieces(sub);
        let bases: Vec<ExactMatrix> = pieces.iter().map(Subspace::basis_matrix).collect();
        let mut actions = Vec::with_capacity(self.actions.len());
        for (r, m) in self.refs.iter().zip(&self.actions) {
            let (from, to) = (&bases[r.dst], &bases[r.src]);
            let coords = if from.cols() == 0 || to.cols() == 0 {
                ExactMatrix::zeros(self.field, to.cols(), from.cols())
            } else {
                to.solve_right(&m.mul(from)?)?.expect("a submodule is closed under the action")
            };
            actions.push(coords);
        }
        let dims: Vec<usize> = pieces.iter().map(Subspace::dim).collect();
        Ok(RightModule { field: self.field, offsets: offsets_of(&dims), dims, refs: self.refs.clone(), actions })
    }

    /// The quotient module M / sub, with representatives at non-pivot columns.
    pub fn quotient(&self, sub: &Subspace) -> RightModule {
        let pieces = self.graded_pieces(sub);
        let free: Vec<Vec<usize>> = pieces
            .iter()
            .zip(&self.dims)
            .map(|(p, &k)| {
                let pivots: BTreeSet<usize> = p.pivots().into_iter().collect();
                (0..k).filter(|j| !pivots.contains(j)).collect()
            })
            .collect();
        let mut actions = Vec::with_capacity(self.actions.len());
        for (r, m) in self.refs.iter().zip(&self.actions) {
            let (from, to) = (&free[r.dst], &free[r.src]);
            let mut q = ExactMatrix::zeros(self.field, to.len(), from.len());
            for (a, &j) in from.iter().enumerate() {
                let red = pieces[r.src].reduce(&m.column(j));
                for (b, &k) in to.iter().enumerate() {
                    q.set(b, a, red[k].clone());
                }
            }
            actions.push(q);
        }
        let dims: Vec<usize> = free.iter().map(Vec::len).collect();
        RightModule { field: self.field, offsets: offsets_of(&dims), dims, refs: self.refs.clone(), actions }
    }
}

/// G ∈ ⊥Σ(pts), tested as G·J = G one point at a time: G(w) must be spanned
/// by the images of G(φ) over the ideal blocks hom(w, z).
pub fn left_perp_member(alg: &CategoryAlgebra, g: &FpFunctor, pts: &BTreeSet<PointId>) -> Result<bool> {
    let d = alg.datum();
    let m = RightModule::from_functor(alg, g)?;
    let pts: Vec<PointId> = pts.iter().copied().collect();
    for w in 0..d.n_points() {
        let mut span = Subspace::new(d.field(), m.dims[w]);
        for z in 0..d.n_points() {
            if span.dim() == m.dims[w] {
                break;
            }
            if m.dims[z] == 0 {
                continue;
            }
            for phi in ideal_block(d, &pts, w, z).basis() {
                let im = m.induced(w, z, phi);
                for j in 0..im.cols() {
                    span.insert(&im.column(j));
                }
            }
        }
        if span.dim() < m.dims[w] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// F ∈ (⊥Σ(pts))⊥, tested as F·J = 0 block by block.
pub fn right_perp_member(alg: &CategoryAlgebra, f: &FpFunctor, pts: &BTreeSet<PointId>) -> Result<bool> {
    let pts: Vec<PointId> = pts.iter().copied().collect();
    Ok(RightModule::from_functor(alg, f)?.annihilated_by_points(alg.datum(), &pts))
}

fn random_scalar(field: FieldSpec, rng: &mut impl Rng) -> Scalar {
    // Small coefficients keep rational runs readable; zero is common on purpose.
    field.from_i64(rng.gen_range(-2..=3))
}

/// A random presentation with one or two target summands and up to three
/// source summands.
pub fn random_functor(d: &CategoryDatum, rng: &mut impl Rng) -> FpFunctor {
    let n = d.n_points();
    let target: Vec<PointId> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..n)).collect();
    let source: Vec<PointId> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..n)).collect();
    let blocks = target
        .iter()
        .map(|&b| source.iter().map(|&a| (0..d.hom_dim(a, b)).map(|_| random_scalar(d.field(), rng)).collect()).collect())
        .collect();
    FpFunctor::new(AddMorphism { source: AddObject::from_summands(source), target: AddObject::from_summands(target), blocks })
}

/// Representables, simples, then `random` random presentations.
pub fn functor_family(d: &CategoryDatum, random: usize, rng: &mut impl Rng) -> Result<Vec<FpFunctor>> {
    let mut out = Vec::new();
    for y in 0..d.n_points() {
        out.push(FpFunctor::representable(d, y));
        out.push(super::simple_quotient(d, y)?);
    }
    out.extend((0..random).map(|_| random_functor(d, rng)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{a, set};
    use super::super::{eval_dim, in_sigma, simple_quotient};
    use super::*;
    use crate::catdatum::build_algebra;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn module_dims_match_evaluation() {
        let d = a(3);
        let alg = build_algebra(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in functor_family(&d, 20, &mut rng).unwrap() {
            let m = RightModule::from_functor(&alg, &f).unwrap();
            let total: usize = (0..3).map(|x| eval_dim(&d, &f, x).unwrap()).sum();
            assert_eq!(m.dim(), total);
        }
    }

    #[test]
    fn perp_extremes() {
        let d = a(2);
        let alg = build_algebra(&d);
        let all = set(&[0, 1]);
        let none = set(&[]);
        let zero = FpFunctor::new(AddMorphism::identity(&d, AddObject::single(0)));
        let rep = FpFunctor::representable(&d, 1);
        assert!(left_perp_member(&alg, &rep, &all).unwrap());
        assert!(!right_perp_member(&alg, &rep, &all).unwrap());
        assert!(right_perp_member(&alg, &zero, &all).unwrap());
        assert!(!left_perp_member(&alg, &rep, &none).unwrap());
        assert!(left_perp_member(&alg, &zero, &none).unwrap());
        assert!(right_perp_member(&alg, &rep, &none).unwrap());
    }

    #[test]
    fn a2_simple_is_in_both() {
        let d = a(2);
        let alg = build_algebra(&d);
        let s = simple_quotient(&d, 1).unwrap();
        let pts = set(&[0]);
        assert!(right_perp_member(&alg, &s, &pts).unwrap());
        assert!(in_sigma(&d, &s, &pts).unwrap());
    }

    #[test]
    fn sigma_matches_right_perp_on_a3() {
        let d = a(3);
        let alg = build_algebra(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let family = functor_family(&d, 30, &mut rng).unwrap();
        for mask in 0u32..8 {
            let pts: BTreeSet<_> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
            for f in &family {
                assert_eq!(in_sigma(&d, f, &pts).unwrap(), right_perp_member(&alg, f, &pts).unwrap());
            }
        }
    }

    #[test]
    fn sub_and_quotient_dims_add_up() {
        let d = a(3);
        let alg = build_algebra(&d);
        let m = RightModule::from_functor(&alg, &FpFunctor::representable(&d, 2)).unwrap();
        let gens = vec![m.unit(m.dim() - 1)];
        let sub = m.submodule(&gens);
        let h = m.restrict(&sub).unwrap();
        let q = m.quotient(&sub);
        assert_eq!(h.dim() + q.dim(), m.dim());
    }
}
