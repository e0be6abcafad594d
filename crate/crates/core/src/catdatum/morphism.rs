use std::collections::BTreeMap;

use super::{CategoryDatum, PointId};
use crate::error::{Error, Result};
use crate::linalg::{zero_vec, ExactMatrix, Scalar};

/// A formal finite direct sum of points, kept as an ordered summand list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AddObject {
    summands: Vec<PointId>,
}

impl AddObject {
    pub fn zero() -> Self {
        AddObject::default()
    }

    pub fn single(x: PointId) -> Self {
        AddObject { summands: vec![x] }
    }

    pub fn from_summands(summands: Vec<PointId>) -> Self {
        AddObject { summands }
    }

    /// Summands grouped by point, in point order.
    pub fn from_multiplicities(m: &BTreeMap<PointId, usize>) -> Self {
        let summands = m.iter().flat_map(|(&x, &k)| std::iter::repeat(x).take(k)).collect();
        AddObject { summands }
    }

    pub fn summands(&self) -> &[PointId] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn multiplicities(&self) -> BTreeMap<PointId, usize> {
        let mut m = BTreeMap::new();
        for &x in &self.summands {
            *m.entry(x).or_insert(0) += 1;
        }
        m
    }

    /// dim Hom(z, self), summing over summands.
    pub fn hom_dim_from(&self, d: &CategoryDatum, z: PointId) -> usize {
        self.summands.iter().map(|&y| d.hom_dim(z, y)).sum()
    }
}

/// A morphism of formal sums. `blocks[t][s]` lies in
/// hom(source[s], target[t]).
#[derive(Clone, Debug, PartialEq)]
pub struct AddMorphism {
    pub source: AddObject,
    pub target: AddObject,
    pub blocks: Vec<Vec<Vec<Scalar>>>,
}

impl AddMorphism {
    pub fn zero(d: &CategoryDatum, source: AddObject, target: AddObject) -> Self {
        let f = d.field();
        let blocks = target
            .summands()
            .iter()
            .map(|&t| source.summands().iter().map(|&s| zero_vec(f, d.hom_dim(s, t))).collect())
            .collect();
        AddMorphism { source, target, blocks }
    }

    pub fn identity(d: &CategoryDatum, obj: AddObject) -> Self {
        let mut m = Self::zero(d, obj.clone(), obj);
        for i in 0..m.source.len() {
            m.blocks[i][i] = d.identity(m.source.summands()[i]).to_vec();
        }
        m
    }

    /// A single element of hom(x, y) as a morphism.
    pub fn from_element(x: PointId, y: PointId, v: Vec<Scalar>) -> Self {
        AddMorphism { source: AddObject::single(x), target: AddObject::single(y), blocks: vec![vec![v]] }
    }

    pub fn check(&self, d: &CategoryDatum) -> Result<()> {
        let n = d.n_points();
        if let Some(&bad) = self.source.summands().iter().chain(self.target.summands()).find(|&&x| x >= n) {
            return Err(Error::UnknownPoint(format!("#{bad}")));
        }
        if self.blocks.len() != self.target.len() {
            return Err(Error::Dimension("block rows do not match target summands".into()));
        }
        for (t, row) in self.blocks.iter().enumerate() {
            if row.len() != self.source.len() {
                return Err(Error::Dimension("block columns do not match source summands".into()));
            }
            for (s, b) in row.iter().enumerate() {
                let want = d.hom_dim(self.source.summands()[s], self.target.summands()[t]);
                if b.len() != want {
                    return Err(Error::Dimension(format!("block ({t},{s}) has length {} not {want}", b.len())));
                }
            }
        }
        Ok(())
    }

    /// `self ∘ f`.
    pub fn compose(&self, d: &CategoryDatum, f: &AddMorphism) -> Result<AddMorphism> {
        if self.source != f.target {
            return Err(Error::Dimension("morphisms are not composable".into()));
        }
        let field = d.field();
        let mut out = Self::zero(d, f.source.clone(), self.target.clone());
        for (t, &z) in self.target.summands().iter().enumerate() {
            for (a, &x) in f.source.summands().iter().enumerate() {
                let acc = &mut out.blocks[t][a];
                for (b, &y) in self.source.summands().iter().enumerate() {
                    let c = d.compose(x, y, z, &self.blocks[t][b], &f.blocks[b][a]);
                    for (u, v) in acc.iter_mut().zip(&c) {
                        *u = field.add(u, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// The restriction to the source summands in `keep` (in that order).
    pub fn restrict_source(&self, keep: &[usize]) -> AddMorphism {
        AddMorphism {
            source: AddObject::from_summands(keep.iter().map(|&i| self.source.summands()[i]).collect()),
            target: self.target.clone(),
            blocks: self.blocks.iter().map(|row| keep.iter().map(|&i| row[i].clone()).collect()).collect(),
        }
    }

    pub fn is_zero(&self, d: &CategoryDatum) -> bool {
        let f = d.field();
        self.blocks.iter().flatten().flatten().all(|s| f.is_zero(s))
    }
}

/// Matrix of Hom(z, g): Hom(z, A) -> Hom(z, B) in the concatenated hom bases.
pub fn hom_matrix(d: &CategoryDatum, z: PointId, g: &AddMorphism) -> Result<ExactMatrix> {
    if z >= d.n_points() {
        return Err(Error::UnknownPoint(format!("#{z}")));
    }
    g.check(d)?;
    let rows = g.target.hom_dim_from(d, z);
    let mut cols = Vec::with_capacity(g.source.hom_dim_from(d, z));
    for (s, &a) in g.source.summands().iter().enumerate() {
        for k in 0..d.hom_dim(z, a) {
            let u = d.unit_vector(z, a, k);
            let mut col = Vec::with_capacity(rows);
            for (t, &b) in g.target.summands().iter().enumerate() {
                col.extend(d.compose(z, a, b, &g.blocks[t][s], &u));
            }
            cols.push(col);
        }
    }
    Ok(ExactMatrix::from_columns(d.field(), rows, &cols))
}

/// Matrix of Hom(h, B): Hom(z, B) -> Hom(x, B), φ ↦ φ ∘ h, for `h` in hom(x, z).
pub fn precompose_matrix(d: &CategoryDatum, x: PointId, z: PointId, h: &[Scalar], target: &AddObject) -> ExactMatrix {
    let rows = target.hom_dim_from(d, x);
    let mut cols = Vec::new();
    for (t, &b) in target.summands().iter().enumerate() {
        for k in 0..d.hom_dim(z, b) {
            let u = d.unit_vector(z, b, k);
            let mut col = Vec::with_capacity(rows);
            for (t2, &b2) in target.summands().iter().enumerate() {
                if t2 == t {
                    col.extend(d.compose(x, z, b, &u, h));
                } else {
                    col.extend(zero_vec(d.field(), d.hom_dim(x, b2)));
                }
            }
            cols.push(col);
        }
    }
    ExactMatrix::from_columns(d.field(), rows, &cols)
}

/// Whether some `s: B -> A` has `g ∘ s = id_B`. Each target summand's
/// inclusion must lift through Hom(y, g).
pub fn is_split_epi(d: &CategoryDatum, g: &AddMorphism) -> Result<bool> {
    g.check(d)?;
    let f = d.field();
    let mut cache: BTreeMap<PointId, ExactMatrix> = BTreeMap::new();
    for (t, &y) in g.target.summands().iter().enumerate() {
        if !cache.contains_key(&y) {
            cache.insert(y, hom_matrix(d, y, g)?);
        }
        let m = &cache[&y];
        // Inclusion of summand t, as an element of Hom(y, B).
        let mut incl = Vec::with_capacity(m.rows());
        for (t2, &b) in g.target.summands().iter().enumerate() {
            if t2 == t {
                incl.extend(d.identity(y).iter().cloned());
            } else {
                incl.extend(zero_vec(f, d.hom_dim(y, b)));
            }
        }
        let rhs = ExactMatrix::from_columns(f, m.rows(), &[incl]);
        if m.solve_right(&rhs)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn identity_gives_identity_matrix() {
        let d = arrow();
        let id = AddMorphism::identity(&d, AddObject::single(1));
        for z in 0..2 {
            let m = hom_matrix(&d, z, &id).unwrap();
            assert_eq!(m, ExactMatrix::identity(d.field(), d.hom_dim(z, 1)));
        }
        assert!(is_split_epi(&d, &id).unwrap());
    }

    #[test]
    fn zero_map_gives_zero_matrix() {
        let d = arrow();
        let g = AddMorphism::zero(&d, AddObject::single(0), AddObject::single(1));
        assert!(hom_matrix(&d, 0, &g).unwrap().is_zero());
        assert!(!is_split_epi(&d, &g).unwrap());
    }

    #[test]
    fn arrow_between_distinct_points_is_not_split() {
        let d = arrow();
        let a = AddMorphism::from_element(0, 1, d.unit_vector(0, 1, 0));
        assert!(!is_split_epi(&d, &a).unwrap());
        let m = hom_matrix(&d, 0, &a).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn empty_target_is_split() {
        let d = arrow();
        let g = AddMorphism::zero(&d, AddObject::single(0), AddObject::zero());
        assert!(is_split_epi(&d, &g).unwrap());
    }

    #[test]
    fn precompose_with_identity_is_identity() {
        let d = arrow();
        let b = AddObject::from_summands(vec![0, 1]);
        let m = precompose_matrix(&d, 0, 0, d.identity(0), &b);
        assert_eq!(m, ExactMatrix::identity(d.field(), b.hom_dim_from(&d, 0)));
    }
}
