//! Stable categories from a ring-level model.
//!
//! A model describes each hom space degree by degree, in its own
//! coordinates (images of generators), together with the subspace that
//! becomes zero in the stable category. Building the datum picks a
//! complement of that subspace in every degree and expands composites in it.

use std::collections::BTreeMap;

use crate::catdatum::{CategoryDatum, DatumBuilder, PointInfo};
use crate::error::{Error, Result};
use crate::linalg::{ExactMatrix, FieldSpec, Scalar, Subspace};

/// A homogeneous element in model coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Rep {
    pub degree: i64,
    pub coords: Vec<Scalar>,
}

pub(crate) trait RingModel: Sync {
    fn field(&self) -> FieldSpec;
    fn points(&self) -> &[PointInfo];
    /// Degrees in which the stable hom space from `i` to `j` can be nonzero.
    fn degrees(&self, i: usize, j: usize) -> Vec<i64>;
    /// Basis of all module maps of the given degree. `reversed` enumerates
    /// the unknowns in the opposite order.
    fn hom_basis(&self, i: usize, j: usize, degree: i64, reversed: bool) -> Vec<Vec<Scalar>>;
    /// Spanning set of the maps that vanish in the stable category.
    fn null_span(&self, i: usize, j: usize, degree: i64) -> Vec<Vec<Scalar>>;
    /// `g ∘ f` for `f: i -> j`, `g: j -> k`.
    fn compose(&self, i: usize, j: usize, k: usize, g: &Rep, f: &Rep) -> Rep;
    fn identity(&self, i: usize) -> Rep;
}

/// Complement basis of one hom space in one degree, with a solver for
/// coordinates modulo the null part.
#[derive(Clone, Debug)]
struct Slot {
    degree: i64,
    reps: Vec<Vec<Scalar>>,
    frame: ExactMatrix,
}

#[derive(Clone, Debug)]
pub(crate) struct StableModel {
    field: FieldSpec,
    n: usize,
    /// Per ordered pair at `i * n + j`.
    slots: Vec<Vec<Slot>>,
}

impl StableModel {
    pub fn build(model: &dyn RingModel, reversed: bool) -> Result<Self> {
        let n = model.points().len();
        let field = model.field();
        let mut slots = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut degrees = model.degrees(i, j);
                if reversed {
                    degrees.reverse();
                }
                let mut pair = Vec::new();
                for d in degrees {
                    let hom = model.hom_basis(i, j, d, reversed);
                    let Some(len) = hom.first().map(Vec::len) else { continue };
                    let mut span = Subspace::new(field, len);
                    let mut null = Vec::new();
                    for v in model.null_span(i, j, d) {
                        if span.insert(&v) {
                            null.push(v);
                        }
                    }
                    let mut reps = Vec::new();
                    let order: Vec<&Vec<Scalar>> =
                        if reversed { hom.iter().rev().collect() } else { hom.iter().collect() };
                    for v in order {
                        if span.insert(v) {
                            reps.push(v.clone());
                        }
                    }
                    if reps.is_empty() {
                        continue;
                    }
                    let mut cols = reps.clone();
                    cols.extend(null);
                    let frame = ExactMatrix::from_columns(field, len, &cols);
                    pair.push(Slot { degree: d, reps, frame });
                }
                slots.push(pair);
            }
        }
        Ok(StableModel { field, n, slots })
    }

    pub fn dim(&self, i: usize, j: usize) -> usize {
        self.slots[i * self.n + j].iter().map(|s| s.reps.len()).sum()
    }

    /// The chosen basis representatives, in basis order.
    pub fn reps(&self, i: usize, j: usize) -> Vec<Rep> {
        self.slots[i * self.n + j]
            .iter()
            .flat_map(|s| s.reps.iter().map(move |c| Rep { degree: s.degree, coords: c.clone() }))
            .collect()
    }

    /// Coordinates of a homogeneous map in the stable basis of hom(i, j).
    pub fn coordinates(&self, i: usize, j: usize, r: &Rep) -> Result<Vec<Scalar>> {
        let mut out = vec![self.field.zero(); self.dim(i, j)];
        let mut offset = 0;
        for s in &self.slots[i * self.n + j] {
            if s.degree == r.degree {
                if r.coords.len() != s.frame.rows() {
                    return Err(Error::Dimension(format!("representative has {} coordinates", r.coords.len())));
                }
                let b = ExactMatrix::from_columns(self.field, r.coords.len(), &[r.coords.clone()]);
                let x = s
                    .frame
                    .solve_right(&b)?
                    .ok_or_else(|| Error::Inconsistent(format!("element of degree {} is not a module map", r.degree)))?;
                for k in 0..s.reps.len() {
                    out[offset + k] = x.get(k, 0).clone();
                }
                return Ok(out);
            }
            offset += s.reps.len();
        }
        // No surviving slot in this degree: the element is stably zero.
        Ok(out)
    }
}

/// Builds the stable datum. Returns it with the representatives of every
/// basis element, keyed by basis name.
pub(crate) fn stable_datum(
    model: &dyn RingModel,
    reversed: bool,
) -> Result<(CategoryDatum, StableModel, BTreeMap<String, Rep>)> {
    let sm = StableModel::build(model, reversed)?;
    let pts = model.points().to_vec();
    let n = pts.len();
    let field = model.field();
    let name = |i: usize, j: usize, k: usize| format!("{}>{}#{k}", pts[i].id, pts[j].id);
    let mut b = DatumBuilder::new(field, pts.clone());
    let mut reps = BTreeMap::new();
    for i in 0..n {
        if sm.dim(i, i) == 0 {
            return Err(Error::Generation(format!("point `{}` is stably zero", pts[i].id)));
        }
        for j in 0..n {
            b.set_hom(i, j, (0..sm.dim(i, j)).map(|k| name(i, j, k)).collect());
            for (k, r) in sm.reps(i, j).into_iter().enumerate() {
                reps.insert(name(i, j, k), r);
            }
        }
    }
    let all_reps: Vec<Vec<Rep>> = (0..n * n).map(|p| sm.reps(p / n, p % n)).collect();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for (gi, g) in all_reps[y * n + z].iter().enumerate() {
                    for (fi, f) in all_reps[x * n + y].iter().enumerate() {
                        let c = sm.coordinates(x, z, &model.compose(x, y, z, g, f))?;
                        b.set_compose(x, y, z, gi, fi, c.into_iter().enumerate().collect());
                    }
                }
            }
        }
    }
    for x in 0..n {
        let id = sm.coordinates(x, x, &model.identity(x))?;
        let rad = trace_radical(&sm, model, x, &id, &all_reps[x * n + x])?;
        b.set_identity(x, id);
        b.set_radical(x, reduced_basis(sm.field, all_reps[x * n + x].len(), &rad)?);
    }
    Ok((b.build()?, sm, reps))
}

/// The nonzero rows of the reduced row echelon form: one canonical basis per
/// subspace, so a shipped radical can be compared entry by entry.
pub(crate) fn reduced_basis(field: FieldSpec, dim: usize, vectors: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let e = ExactMatrix::from_rows(field, dim, vectors.to_vec())?.rref();
    Ok((0..e.pivots.len()).map(|i| e.matrix.row(i).to_vec()).collect())
}

/// Radical of a local endomorphism ring with residue field k: the kernel of
/// `a ↦ trace(left multiplication by a) / dim`.
fn trace_radical(sm: &StableModel, model: &dyn RingModel, x: usize, id: &[Scalar], basis: &[Rep]) -> Result<Vec<Vec<Scalar>>> {
    let f = sm.field;
    let m = basis.len();
    let dim = f.from_i64(m as i64);
    let inv = f
        .inv(&dim)
        .ok_or_else(|| Error::Generation(format!("characteristic divides dim End({})", model.points()[x].id)))?;
    let mut lambda = Vec::with_capacity(m);
    for a in basis {
        let mut tr = f.zero();
        for (k, b) in basis.iter().enumerate() {
            let c = sm.coordinates(x, x, &model.compose(x, x, x, a, b))?;
            tr = f.add(&tr, &c[k]);
        }
        lambda.push(f.mul(&tr, &inv));
    }
    let on_id = id.iter().zip(&lambda).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)));
    if on_id != f.one() {
        return Err(Error::Generation(format!("End({}) is not local over the base field", model.points()[x].id)));
    }
    let row = ExactMatrix::from_rows(f, m, vec![lambda])?;
    Ok(row.nullspace())
}
