//! Closure spaces: the spectrum of a finite datum, and abstract finite
//! spaces given by closure tables. Closure, isolated points and
//! Cantor-Bendixson rank work on either through [`ClosureSpace`].

mod cb;
mod checks;
mod table;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::catdatum::{build_algebra, ideal_block, AddMorphism, CategoryAlgebra, CategoryDatum, PointId};
use crate::error::{Error, Result};
use crate::functors::{eval_dim, exclusion_witness, simple_quotient};

pub use cb::{cb_rank, CbRank, CbReport};
pub use checks::{
    contravariant_finiteness_check, galois_check, kuratowski_check, perp_check, serre_correspondence_check, serre_stability_check,
    t1_check, CheckMode,
    ContravariantReport, PropertyReport,
};
pub use table::{TableSpace, TOP_SCHEMA};

pub type PointSet = BTreeSet<PointId>;

/// A finite point set with a closure operator. Kuratowski axioms are checked
/// by [`kuratowski_check`], never assumed.
pub trait ClosureSpace: Sync {
    fn names(&self) -> Vec<String>;

    fn closure(&self, pts: &PointSet) -> Result<PointSet>;

    fn n_points(&self) -> usize {
        self.names().len()
    }

    fn all_points(&self) -> PointSet {
        (0..self.n_points()).collect()
    }

    fn is_closed(&self, pts: &PointSet) -> Result<bool> {
        Ok(&self.closure(pts)? == pts)
    }

    /// Points M whose complement is closed.
    fn isolated_points(&self) -> Result<PointSet> {
        isolated_in(self, &self.all_points())
    }
}

/// Points isolated in the subspace `sub`, under the induced closure
/// `closure(X) ∩ sub`.
pub fn isolated_in<S: ClosureSpace + ?Sized>(space: &S, sub: &PointSet) -> Result<PointSet> {
    let found: Vec<Option<PointId>> = sub
        .par_iter()
        .map(|&m| {
            let mut rest = sub.clone();
            rest.remove(&m);
            let c: PointSet = space.closure(&rest)?.intersection(sub).copied().collect();
            Ok((c == rest).then_some(m))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

pub fn names_of(names: &[String], pts: &PointSet) -> Vec<String> {
    pts.iter().map(|&i| names[i].clone()).collect()
}

/// Parses a comma-separated list of point ids.
pub fn parse_point_set(names: &[String], list: &str) -> Result<PointSet> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| names.iter().position(|n| n == s).ok_or_else(|| Error::UnknownPoint(s.to_string())))
        .collect()
}

/// Closure together with one exclusion witness per excluded point.
#[derive(Clone, Debug)]
pub struct ClosureResult {
    pub closure: PointSet,
    pub witnesses: BTreeMap<PointId, AddMorphism>,
}

/// The spectrum of a finite datum.
#[derive(Clone, Debug)]
pub struct DatumSpace {
    datum: CategoryDatum,
    alg: CategoryAlgebra,
}

impl DatumSpace {
    pub fn new(datum: CategoryDatum) -> Self {
        let alg = build_algebra(&datum);
        DatumSpace { datum, alg }
    }

    pub fn datum(&self) -> &CategoryDatum {
        &self.datum
    }

    pub fn algebra(&self) -> &CategoryAlgebra {
        &self.alg
    }

    fn check(&self, pts: &PointSet) -> Result<()> {
        match pts.iter().find(|&&x| x >= self.datum.n_points()) {
            Some(x) => Err(Error::UnknownPoint(format!("#{x}"))),
            None => Ok(()),
        }
    }

    /// Y is in the closure iff e_Y lies in the ideal generated by the
    /// idempotents of `pts`. Only the hom(Y, Y) block of the ideal matters.
    pub fn closure_by_ideal(&self, pts: &PointSet) -> Result<PointSet> {
        self.check(pts)?;
        let pts: Vec<PointId> = pts.iter().copied().collect();
        let d = &self.datum;
        let closure = (0..d.n_points())
            .into_par_iter()
            .filter(|&y| ideal_block(d, &pts, y, y).contains(d.identity(y)))
            .collect::<Vec<_>>();
        Ok(closure.into_iter().collect())
    }

    /// Y is outside the closure iff an exclusion witness exists.
    pub fn closure_by_witness(&self, pts: &PointSet) -> Result<ClosureResult> {
        self.check(pts)?;
        let per_point: Vec<(PointId, Option<AddMorphism>)> = (0..self.datum.n_points())
            .into_par_iter()
            .map(|y| Ok((y, exclusion_witness(&self.datum, y, pts)?)))
            .collect::<Result<_>>()?;
        let mut closure = PointSet::new();
        let mut witnesses = BTreeMap::new();
        for (y, w) in per_point {
            match w {
                Some(g) => {
                    witnesses.insert(y, g);
                }
                None => {
                    closure.insert(y);
                }
            }
        }
        Ok(ClosureResult { closure, witnesses })
    }

    /// Both routes; any disagreement is an error.
    pub fn closure_checked(&self, pts: &PointSet) -> Result<ClosureResult> {
        let by_ideal = self.closure_by_ideal(pts)?;
        let r = self.closure_by_witness(pts)?;
        if by_ideal != r.closure {
            let names = self.names();
            return Err(Error::Inconsistent(format!(
                "closure of {:?}: ideal route gives {:?}, witness route gives {:?}",
                names_of(&names, pts),
                names_of(&names, &by_ideal),
                names_of(&names, &r.closure)
            )));
        }
        Ok(r)
    }

    /// M is isolated iff the simple functor at M, the cokernel of its right
    /// almost split map, vanishes off M and not at M.
    pub fn isolated_by_ar(&self) -> Result<PointSet> {
        let d = &self.datum;
        let mut out = PointSet::new();
        for m in 0..d.n_points() {
            let s = simple_quotient(d, m)?;
            let mut ok = eval_dim(d, &s, m)? > 0;
            for x in (0..d.n_points()).filter(|&x| x != m) {
                ok &= eval_dim(d, &s, x)? == 0;
            }
            if ok {
                out.insert(m);
            }
        }
        Ok(out)
    }
}

impl ClosureSpace for DatumSpace {
    fn names(&self) -> Vec<String> {
        self.datum.points().iter().map(|p| p.id.clone()).collect()
    }

    fn n_points(&self) -> usize {
        self.datum.n_points()
    }

    fn closure(&self, pts: &PointSet) -> Result<PointSet> {
        Ok(self.closure_checked(pts)?.closure)
    }

    fn isolated_points(&self) -> Result<PointSet> {
        let by_closure = isolated_in(self, &self.all_points())?;
        let by_ar = self.isolated_by_ar()?;
        if by_closure != by_ar {
            let names = self.names();
            return Err(Error::Inconsistent(format!(
                "isolated points: closure route gives {:?}, AR route gives {:?}",
                names_of(&names, &by_closure),
                names_of(&names, &by_ar)
            )));
        }
        Ok(by_closure)
    }
}
