use std::collections::BTreeSet;

use super::FpFunctor;
use crate::catdatum::{hom_matrix, is_split_epi, AddMorphism, AddObject, CategoryDatum, PointId};
use crate::error::{Error, Result};
use crate::linalg::Subspace;

fn check_point(d: &CategoryDatum, x: PointId) -> Result<()> {
    if x >= d.n_points() {
        return Err(Error::UnknownPoint(format!("#{x}")));
    }
    Ok(())
}

/// Every basis element of hom(x, y) for x in `pts`, one summand each.
pub(crate) fn canonical_map(d: &CategoryDatum, y: PointId, pts: &BTreeSet<PointId>) -> AddMorphism {
    let mut summands = Vec::new();
    let mut blocks = Vec::new();
    for &x in pts {
        for k in 0..d.hom_dim(x, y) {
            summands.push(x);
            blocks.push(d.unit_vector(x, y, k));
        }
    }
    AddMorphism { source: AddObject::from_summands(summands), target: AddObject::single(y), blocks: vec![blocks] }
}

/// Drops source summands one at a time, in order, whenever `ok` still holds
/// without them.
pub(crate) fn prune(g: &AddMorphism, mut ok: impl FnMut(&AddMorphism) -> Result<bool>) -> Result<AddMorphism> {
    let mut keep: Vec<usize> = (0..g.source.len()).collect();
    let mut i = 0;
    while i < keep.len() {
        let mut trial = keep.clone();
        trial.remove(i);
        if ok(&g.restrict_source(&trial))? {
            keep = trial;
        } else {
            i += 1;
        }
    }
    Ok(g.restrict_source(&keep))
}

/// Whether every map from every point of `pts` into the target of `g`
/// factors through `g`.
pub(crate) fn factors_all(d: &CategoryDatum, g: &AddMorphism, pts: &BTreeSet<PointId>) -> Result<bool> {
    for &x in pts {
        if !hom_matrix(d, x, g)?.is_surjective() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A map `g: A -> y` with A in add(pts), through which every map from pts
/// into `y` factors, and which is not a split epimorphism. `None` when no
/// such map exists, which for a valid datum means `y ∈ pts`.
pub fn exclusion_witness(d: &CategoryDatum, y: PointId, pts: &BTreeSet<PointId>) -> Result<Option<AddMorphism>> {
    check_point(d, y)?;
    for &x in pts {
        check_point(d, x)?;
    }
    if pts.contains(&y) {
        return Ok(None);
    }
    let g = canonical_map(d, y, pts);
    if is_split_epi(d, &g)? {
        return Ok(None);
    }
    Ok(Some(prune(&g, |h| factors_all(d, h, pts))?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RightAlmostSplitData {
    pub target: PointId,
    pub map: AddMorphism,
    pub minimal: bool,
}

/// Whether the image of Hom(x, e) is rad(x, m) at every point x.
fn image_is_radical(d: &CategoryDatum, m: PointId, e: &AddMorphism) -> Result<bool> {
    let f = d.field();
    for x in 0..d.n_points() {
        let h = hom_matrix(d, x, e)?;
        if x != m {
            if !h.is_surjective() {
                return Ok(false);
            }
            continue;
        }
        let rad = Subspace::spanned_by(f, d.hom_dim(m, m), d.radical(m));
        let image = Subspace::spanned_by(f, d.hom_dim(m, m), &(0..h.cols()).map(|c| h.column(c)).collect::<Vec<_>>());
        if !image.equals(&rad) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The minimal right almost split map into `m`: start from every basis map
/// from another point plus the radical basis of End(m), then prune.
pub fn right_almost_split(d: &CategoryDatum, m: PointId) -> Result<RightAlmostSplitData> {
    check_point(d, m)?;
    let mut summands = Vec::new();
    let mut blocks = Vec::new();
    for x in 0..d.n_points() {
        if x == m {
            for r in d.radical(m) {
                summands.push(m);
                blocks.push(r.clone());
            }
        } else {
            for k in 0..d.hom_dim(x, m) {
                summands.push(x);
                blocks.push(d.unit_vector(x, m, k));
            }
        }
    }
    let e = AddMorphism { source: AddObject::from_summands(summands), target: AddObject::single(m), blocks: vec![blocks] };
    if !image_is_radical(d, m, &e)? {
        return Err(Error::Inconsistent(format!("maps into {} do not generate its radical", d.point(m).id)));
    }
    let map = prune(&e, |h| image_is_radical(d, m, h))?;
    Ok(RightAlmostSplitData { target: m, map, minimal: true })
}

/// The simple functor at `m`: the cokernel of Hom(-, e) for the right almost
/// split map e.
pub fn simple_quotient(d: &CategoryDatum, m: PointId) -> Result<FpFunctor> {
    Ok(FpFunctor::new(right_almost_split(d, m)?.map))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{a, set};
    use super::super::{eval_dim, in_sigma};
    use super::*;
    use crate::catdatum::fixtures::simple_point;

    #[test]
    fn empty_set_gives_zero_witness() {
        let d = a(2);
        let g = exclusion_witness(&d, 1, &set(&[])).unwrap().unwrap();
        assert!(g.source.is_empty());
        assert!(!is_split_epi(&d, &g).unwrap());
    }

    #[test]
    fn a2_witness_is_cross_generator() {
        let d = a(2);
        let g = exclusion_witness(&d, 1, &set(&[0])).unwrap().unwrap();
        assert_eq!(g.source.summands(), &[0]);
        assert_eq!(g.blocks[0][0], d.unit_vector(0, 1, 0));
        assert!(hom_matrix(&d, 0, &g).unwrap().is_surjective());
        assert!(!is_split_epi(&d, &g).unwrap());
        assert_eq!(exclusion_witness(&d, 0, &set(&[0])).unwrap(), None);
    }

    #[test]
    fn witness_soundness_on_a4() {
        let d = a(4);
        for y in 0..4 {
            for mask in 0u32..16 {
                let pts: BTreeSet<_> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
                match exclusion_witness(&d, y, &pts).unwrap() {
                    Some(g) => {
                        let f = FpFunctor::new(g);
                        assert!(in_sigma(&d, &f, &pts).unwrap());
                        assert!(eval_dim(&d, &f, y).unwrap() >= 1);
                    }
                    None => assert!(pts.contains(&y)),
                }
            }
        }
    }

    #[test]
    fn single_point_almost_split_map_is_zero() {
        let d = simple_point();
        let r = right_almost_split(&d, 0).unwrap();
        assert!(r.map.source.is_empty());
        assert!(r.minimal);
        assert_eq!(eval_dim(&d, &simple_quotient(&d, 0).unwrap(), 0).unwrap(), 1);
    }

    #[test]
    fn a2_almost_split_maps() {
        let d = a(2);
        for (m, other) in [(1, 0), (0, 1)] {
            let r = right_almost_split(&d, m).unwrap();
            assert_eq!(r.map.source.summands(), &[other]);
            assert_eq!(r.map.blocks[0][0], d.unit_vector(other, m, 0));
            let s = simple_quotient(&d, m).unwrap();
            assert_eq!(eval_dim(&d, &s, m).unwrap(), 1);
            assert_eq!(eval_dim(&d, &s, other).unwrap(), 0);
        }
    }

    #[test]
    fn simples_on_a5() {
        let d = a(5);
        for m in 0..5 {
            let s = simple_quotient(&d, m).unwrap();
            for x in 0..5 {
                let want = if x == m { d.hom_dim(m, m) - d.radical(m).len() } else { 0 };
                assert_eq!(eval_dim(&d, &s, x).unwrap(), want);
            }
        }
    }
}
