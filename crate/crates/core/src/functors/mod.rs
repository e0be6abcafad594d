//! Finitely presented functors, each stored as its presentation
//! `g: A -> B` with `F = coker Hom(-, g)`.

mod io;
mod module;
mod witness;

use std::collections::BTreeSet;

use crate::catdatum::{hom_matrix, AddMorphism, AddObject, CategoryDatum, PointId};
use crate::error::Result;

pub use io::FUNCTOR_SCHEMA;
pub use module::{functor_family, left_perp_member, random_functor, right_perp_member, RightModule};
pub(crate) use witness::{canonical_map, prune};
pub use witness::{exclusion_witness, right_almost_split, simple_quotient, RightAlmostSplitData};

#[derive(Clone, Debug, PartialEq)]
pub struct FpFunctor {
    pub presentation: AddMorphism,
}

impl FpFunctor {
    pub fn new(presentation: AddMorphism) -> Self {
        FpFunctor { presentation }
    }

    /// Hom(-, y), presented by the zero map out of the zero object.
    pub fn representable(d: &CategoryDatum, y: PointId) -> Self {
        FpFunctor::new(AddMorphism::zero(d, AddObject::zero(), AddObject::single(y)))
    }
}

/// dim F(x) = dim Hom(x, B) − rank Hom(x, g).
pub fn eval_dim(d: &CategoryDatum, f: &FpFunctor, x: PointId) -> Result<usize> {
    let m = hom_matrix(d, x, &f.presentation)?;
    Ok(m.rows() - m.rank())
}

/// Whether F vanishes on every point of `pts`.
pub fn in_sigma(d: &CategoryDatum, f: &FpFunctor, pts: &BTreeSet<PointId>) -> Result<bool> {
    for &x in pts {
        if eval_dim(d, f, x)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::linalg::FieldSpec;
    use crate::packs::{gen_an_pack, ArtinianRingSpec};

    pub fn a(n: usize) -> CategoryDatum {
        gen_an_pack(ArtinianRingSpec { n, field: FieldSpec::default_prime() }).unwrap().datum
    }

    pub fn set(xs: &[PointId]) -> BTreeSet<PointId> {
        xs.iter().copied().collect()
    }

    #[test]
    fn identity_presentation_is_zero() {
        let d = a(2);
        let f = FpFunctor::new(AddMorphism::identity(&d, AddObject::single(1)));
        for x in 0..2 {
            assert_eq!(eval_dim(&d, &f, x).unwrap(), 0);
        }
    }

    #[test]
    fn yoneda_dimensions() {
        let d = a(3);
        for y in 0..3 {
            let f = FpFunctor::representable(&d, y);
            for x in 0..3 {
                assert_eq!(eval_dim(&d, &f, x).unwrap(), d.hom_dim(x, y));
            }
            assert!(!in_sigma(&d, &f, &set(&[y])).unwrap());
            assert!(in_sigma(&d, &f, &set(&[])).unwrap());
        }
    }

    #[test]
    fn a2_cokernel_of_cross_generator() {
        let d = a(2);
        let g = AddMorphism::from_element(0, 1, d.unit_vector(0, 1, 0));
        assert!(hom_matrix(&d, 1, &g).unwrap().is_zero());
        let f = FpFunctor::new(g);
        assert_eq!(eval_dim(&d, &f, 0).unwrap(), 0);
        assert_eq!(eval_dim(&d, &f, 1).unwrap(), 1);
    }
}
