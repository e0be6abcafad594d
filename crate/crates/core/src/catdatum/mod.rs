//! Finite stable Krull-Schmidt categories given by structure constants.
//!
//! A [`CategoryDatum`] lists its indecomposable points, a named basis for
//! every hom space, the composition of every composable basis pair, the
//! identity of each point and a declared basis of each endomorphism radical.
//! The free module is the zero object of the stable category and is never a
//! point.
//!
//! Composition convention: `compose(g, f)` is "g after f" for `f: X -> Y`,
//! `g: Y -> Z`. Point order fixes every basis order, and therefore every
//! deterministic tie-break downstream.

mod algebra;
mod io;
mod morphism;
mod validate;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{zero_vec, FieldSpec, Scalar};

pub use algebra::{build_algebra, ideal_block, idempotent_ideal, CategoryAlgebra};
pub use io::DATUM_SCHEMA;
pub use morphism::{hom_matrix, is_split_epi, precompose_matrix, AddMorphism, AddObject};
pub use validate::{validate_datum, ValidationReport, Violation};

pub type PointId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointInfo {
    pub id: String,
    /// Locally free on the punctured spectrum.
    pub locally_free: bool,
}

/// Location of a named basis element: the `idx`-th basis vector of hom(src, dst).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisRef {
    pub src: PointId,
    pub dst: PointId,
    pub idx: usize,
}

type Sparse = Vec<(usize, Scalar)>;

#[derive(Clone, Debug, PartialEq)]
pub struct CategoryDatum {
    field: FieldSpec,
    points: Vec<PointInfo>,
    /// Basis names of hom(src, dst) at `src * n + dst`.
    homs: Vec<Vec<String>>,
    /// Table for the triple (x, y, z) at `(x * n + y) * n + z`; entry
    /// `g * dim(x, y) + f` holds g∘f for `f` in hom(x, y), `g` in hom(y, z).
    compose: Vec<Vec<Sparse>>,
    identities: Vec<Vec<Scalar>>,
    radicals: Vec<Vec<Vec<Scalar>>>,
    index: HashMap<String, BasisRef>,
}

impl CategoryDatum {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[PointInfo] {
        &self.points
    }

    pub fn point(&self, x: PointId) -> &PointInfo {
        &self.points[x]
    }

    pub fn point_index(&self, id: &str) -> Result<PointId> {
        self.points.iter().position(|p| p.id == id).ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    pub fn point_indices<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<PointId>> {
        ids.iter().map(|s| self.point_index(s.as_ref())).collect()
    }

    pub fn hom_dim(&self, src: PointId, dst: PointId) -> usize {
        self.homs[src * self.n_points() + dst].len()
    }

    pub fn hom_basis(&self, src: PointId, dst: PointId) -> &[String] {
        &self.homs[src * self.n_points() + dst]
    }

    pub fn basis_ref(&self, name: &str) -> Option<BasisRef> {
        self.index.get(name).copied()
    }

    pub fn identity(&self, x: PointId) -> &[Scalar] {
        &self.identities[x]
    }

    pub fn radical(&self, x: PointId) -> &[Vec<Scalar>] {
        &self.radicals[x]
    }

    fn table(&self, x: PointId, y: PointId, z: PointId) -> &[Sparse] {
        let n = self.n_points();
        &self.compose[(x * n + y) * n + z]
    }

    /// g∘f for basis elements `f = hom(x, y)[f_idx]`, `g = hom(y, z)[g_idx]`.
    pub fn compose_basis(&self, x: PointId, y: PointId, z: PointId, g_idx: usize, f_idx: usize) -> &[(usize, Scalar)] {
        &self.table(x, y, z)[g_idx * self.hom_dim(x, y) + f_idx]
    }

    /// Bilinear composition of coordinate vectors `f ∈ hom(x, y)`, `g ∈ hom(y, z)`.
    pub fn compose(&self, x: PointId, y: PointId, z: PointId, g: &[Scalar], f: &[Scalar]) -> Vec<Scalar> {
        let field = self.field;
        let dxy = self.hom_dim(x, y);
        debug_assert_eq!(f.len(), dxy);
        debug_assert_eq!(g.len(), self.hom_dim(y, z));
        let table = self.table(x, y, z);
        let mut out = zero_vec(field, self.hom_dim(x, z));
        for (a, ga) in g.iter().enumerate() {
            if field.is_zero(ga) {
                continue;
            }
            for (b, fb) in f.iter().enumerate() {
                if field.is_zero(fb) {
                    continue;
                }
                let c = field.mul(ga, fb);
                for (k, v) in &table[a * dxy + b] {
                    field.mul_add_assign(&mut out[*k], &c, v);
                }
            }
        }
        out
    }

    /// Coordinate vector of a single basis element of hom(src, dst).
    pub fn unit_vector(&self, src: PointId, dst: PointId, idx: usize) -> Vec<Scalar> {
        let mut v = zero_vec(self.field, self.hom_dim(src, dst));
        v[idx] = self.field.one();
        v
    }

    pub fn element_from_terms(&self, src: PointId, dst: PointId, terms: &[(String, Scalar)]) -> Result<Vec<Scalar>> {
        let mut v = zero_vec(self.field, self.hom_dim(src, dst));
        for (name, c) in terms {
            let r = self.basis_ref(name).ok_or_else(|| Error::input(format!("unknown basis element `{name}`")))?;
            if r.src != src || r.dst != dst {
                return Err(Error::input(format!(
                    "basis element `{name}` is not in hom({}, {})",
                    self.points[src].id, self.points[dst].id
                )));
            }
            v[r.idx] = self.field.add(&v[r.idx], c);
        }
        Ok(v)
    }

    /// The full subcategory on `keep`, in the given order.
    pub fn restrict(&self, keep: &[PointId]) -> CategoryDatum {
        let mut b = DatumBuilder::new(self.field, keep.iter().map(|&x| self.points[x].clone()).collect());
        for (i, &x) in keep.iter().enumerate() {
            for (j, &y) in keep.iter().enumerate() {
                b.set_hom(i, j, self.hom_basis(x, y).to_vec());
            }
        }
        for (i, &x) in keep.iter().enumerate() {
            b.set_identity(i, self.identity(x).to_vec());
            b.set_radical(i, self.radical(x).to_vec());
            for (j, &y) in keep.iter().enumerate() {
                for (k, &z) in keep.iter().enumerate() {
                    for g in 0..self.hom_dim(y, z) {
                        for f in 0..self.hom_dim(x, y) {
                            let r = self.compose_basis(x, y, z, g, f);
                            if !r.is_empty() {
                                b.set_compose(i, j, k, g, f, r.to_vec());
                            }
                        }
                    }
                }
            }
        }
        b.build().expect("restriction of a well-formed datum is well-formed")
    }

    /// Disjoint union with zero homs between the two parts. Point ids and
    /// basis names of `other` get `prefix` prepended.
    pub fn disjoint_union(&self, other: &CategoryDatum, prefix: &str) -> Result<CategoryDatum> {
        if self.field != other.field {
            return Err(Error::input("disjoint union of data over different fields"));
        }
        let n1 = self.n_points();
        let mut points = self.points.clone();
        points.extend(other.points.iter().map(|p| PointInfo { id: format!("{prefix}{}", p.id), ..p.clone() }));
        let mut b = DatumBuilder::new(self.field, points);
        for (part, off, pre) in [(self, 0, ""), (other, n1, prefix)] {
            let n = part.n_points();
            for x in 0..n {
                b.set_identity(x + off, part.identity(x).to_vec());
                b.set_radical(x + off, part.radical(x).to_vec());
                for y in 0..n {
                    b.set_hom(x + off, y + off, part.hom_basis(x, y).iter().map(|s| format!("{pre}{s}")).collect());
                    for z in 0..n {
                        for g in 0..part.hom_dim(y, z) {
                            for f in 0..part.hom_dim(x, y) {
                                let r = part.compose_basis(x, y, z, g, f);
                                if !r.is_empty() {
                                    b.set_compose(x + off, y + off, z + off, g, f, r.to_vec());
                                }
                            }
                        }
                    }
                }
            }
        }
        b.build()
    }
}

/// Incremental constructor used by the parser and the pack generators.
#[derive(Clone, Debug)]
pub struct DatumBuilder {
    field: FieldSpec,
    points: Vec<PointInfo>,
    homs: Vec<Vec<String>>,
    compose: HashMap<(usize, usize, usize, usize, usize), Sparse>,
    identities: Vec<Option<Vec<Scalar>>>,
    radicals: Vec<Vec<Vec<Scalar>>>,
}

impl DatumBuilder {
    pub fn new(field: FieldSpec, points: Vec<PointInfo>) -> Self {
        let n = points.len();
        DatumBuilder {
            field,
            points,
            homs: vec![Vec::new(); n * n],
            compose: HashMap::new(),
            identities: vec![None; n],
            radicals: vec![Vec::new(); n],
        }
    }

    pub fn set_hom(&mut self, src: PointId, dst: PointId, basis: Vec<String>) {
        let n = self.points.len();
        self.homs[src * n + dst] = basis;
    }

    /// Records g∘f (sparse, in the basis of hom(x, z)); zero entries are dropped.
    pub fn set_compose(&mut self, x: PointId, y: PointId, z: PointId, g: usize, f: usize, result: Sparse) {
        let field = self.field;
        let result: Sparse = result.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        self.compose.insert((x, y, z, g, f), result);
    }

    pub fn set_identity(&mut self, x: PointId, element: Vec<Scalar>) {
        self.identities[x] = Some(element);
    }

    pub fn set_radical(&mut self, x: PointId, basis: Vec<Vec<Scalar>>) {
        self.radicals[x] = basis;
    }

    pub fn build(self) -> Result<CategoryDatum> {
        let n = self.points.len();
        let mut seen = HashMap::new();
        for (i, p) in self.points.iter().enumerate() {
            if seen.insert(p.id.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate point id `{}`", p.id)));
            }
        }
        let mut index = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                for (k, name) in self.homs[x * n + y].iter().enumerate() {
                    if index.insert(name.clone(), BasisRef { src: x, dst: y, idx: k }).is_some() {
                        return Err(Error::input(format!("duplicate basis name `{name}`")));
                    }
                }
            }
        }
        let dim = |a: usize, b: usize| self.homs[a * n + b].len();
        let mut compose = vec![Vec::new(); n * n * n];
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    compose[(x * n + y) * n + z] = vec![Vec::new(); dim(x, y) * dim(y, z)];
                }
            }
        }
        for ((x, y, z, g, f), r) in self.compose {
            if g >= dim(y, z) || f >= dim(x, y) {
                return Err(Error::input(format!("composition index out of range for ({x},{y},{z})")));
            }
            if r.iter().any(|(k, _)| *k >= dim(x, z)) {
                return Err(Error::input(format!("composition result out of range for ({x},{y},{z})")));
            }
            let mut r = r;
            r.sort_by_key(|(k, _)| *k);
            compose[(x * n + y) * n + z][g * dim(x, y) + f] = r;
        }
        let mut identities = Vec::with_capacity(n);
        for (x, id) in self.identities.into_iter().enumerate() {
            let id = id.ok_or_else(|| Error::input(format!("missing identity for `{}`", self.points[x].id)))?;
            if id.len() != dim(x, x) {
                return Err(Error::input(format!("identity of `{}` has wrong length", self.points[x].id)));
            }
            identities.push(id);
        }
        for (x, rad) in self.radicals.iter().enumerate() {
            if rad.iter().any(|v| v.len() != dim(x, x)) {
                return Err(Error::input(format!("radical vector of `{}` has wrong length", self.points[x].id)));
            }
        }
        Ok(CategoryDatum {
            field: self.field,
            points: self.points,
            homs: self.homs,
            compose,
            identities,
            radicals: self.radicals,
            index,
        })
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// One point with End = k.
    pub fn simple_point() -> CategoryDatum {
        let f = FieldSpec::default_prime();
        let mut b = DatumBuilder::new(f, vec![PointInfo { id: "S".into(), locally_free: true }]);
        b.set_hom(0, 0, vec!["1_S".into()]);
        b.set_compose(0, 0, 0, 0, 0, vec![(0, f.one())]);
        b.set_identity(0, vec![f.one()]);
        b.build().unwrap()
    }

    /// Two points with End = k and zero cross homs.
    pub fn two_simple_points() -> CategoryDatum {
        let s = simple_point();
        s.disjoint_union(&s, "T").unwrap()
    }

    /// Two points X, Y with End = k and one cross map a: X -> Y; all
    /// composites of cross maps vanish.
    pub fn arrow() -> CategoryDatum {
        let f = FieldSpec::default_prime();
        let pts = vec![
            PointInfo { id: "X".into(), locally_free: true },
            PointInfo { id: "Y".into(), locally_free: true },
        ];
        let mut b = DatumBuilder::new(f, pts);
        b.set_hom(0, 0, vec!["1_X".into()]);
        b.set_hom(1, 1, vec!["1_Y".into()]);
        b.set_hom(0, 1, vec!["a".into()]);
        b.set_identity(0, vec![f.one()]);
        b.set_identity(1, vec![f.one()]);
        b.set_compose(0, 0, 0, 0, 0, vec![(0, f.one())]);
        b.set_compose(1, 1, 1, 0, 0, vec![(0, f.one())]);
        b.set_compose(0, 0, 1, 0, 0, vec![(0, f.one())]);
        b.set_compose(0, 1, 1, 0, 0, vec![(0, f.one())]);
        b.build().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn restriction_keeps_structure() {
        let d = arrow();
        let r = d.restrict(&[1]);
        assert_eq!(r.n_points(), 1);
        assert_eq!(r.point(0).id, "Y");
        assert!(validate_datum(&r).is_valid());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let f = FieldSpec::default_prime();
        let p = PointInfo { id: "A".into(), locally_free: true };
        let b = DatumBuilder::new(f, vec![p.clone(), p]);
        assert!(matches!(b.build(), Err(Error::Input(_))));
    }

    #[test]
    fn disjoint_union_has_no_cross_homs() {
        let d = two_simple_points();
        assert_eq!(d.n_points(), 2);
        assert_eq!(d.hom_dim(0, 1), 0);
        assert_eq!(d.point(1).id, "TS");
        assert!(validate_datum(&d).is_valid());
    }
}
