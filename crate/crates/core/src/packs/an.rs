//! Modules over k[x]/(x^(n+1)).
//!
//! The indecomposables are M_i = k[x]/(x^i) for i = 1..n+1, with M_(n+1) the
//! free module. A map out of M_i is determined by the image of 1, which is
//! the model coordinate; the full commuting matrix is used to enumerate maps.

use serde::{Deserialize, Serialize};

use super::oracle::{Rep, RingModel};
use crate::catdatum::PointInfo;
use crate::error::{Error, Result};
use crate::linalg::{ExactMatrix, FieldSpec, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtinianRingSpec {
    pub n: usize,
    pub field: FieldSpec,
}

pub(crate) struct AnModel {
    spec: ArtinianRingSpec,
    points: Vec<PointInfo>,
    /// Module length of each point; the free module has length n + 1.
    lengths: Vec<usize>,
}

impl AnModel {
    pub fn new(spec: ArtinianRingSpec) -> Result<Self> {
        if spec.n == 0 {
            return Err(Error::input("the ring k[x]/(x^(n+1)) needs n >= 1"));
        }
        let points = (1..=spec.n).map(|i| PointInfo { id: format!("M{i}"), locally_free: true }).collect();
        Ok(AnModel { spec, points, lengths: (1..=spec.n).collect() })
    }

    /// Restricted to the listed module lengths, in that order.
    pub fn with_lengths(spec: ArtinianRingSpec, lengths: Vec<usize>) -> Result<Self> {
        if let Some(&l) = lengths.iter().find(|&&l| l == 0 || l > spec.n) {
            return Err(Error::input(format!("no non-free indecomposable of length {l}")));
        }
        let points = lengths.iter().map(|i| PointInfo { id: format!("M{i}"), locally_free: true }).collect();
        Ok(AnModel { spec, points, lengths })
    }

    fn free(&self) -> usize {
        self.spec.n + 1
    }

    /// Image of 1 under `f` followed by `g`: the product of the two images,
    /// truncated to length `len`.
    fn multiply(&self, g: &[Scalar], f: &[Scalar], len: usize) -> Vec<Scalar> {
        let fs = self.spec.field;
        let mut out = vec![fs.zero(); len];
        for (a, fa) in f.iter().enumerate() {
            if fs.is_zero(fa) {
                continue;
            }
            for (b, gb) in g.iter().enumerate() {
                if a + b < len {
                    fs.mul_add_assign(&mut out[a + b], fa, gb);
                }
            }
        }
        out
    }

    /// Maps k[x]/(x^a) -> k[x]/(x^b) as images of 1, from the kernel of
    /// A ↦ A·J_a − J_b·A on b×a matrices.
    fn maps_between_lengths(&self, a: usize, b: usize, reversed: bool) -> Vec<Vec<Scalar>> {
        let f = self.spec.field;
        let nvars = a * b;
        // Variable (r, c) of A sits at r * a + c, or mirrored when reversed.
        let var = |r: usize, c: usize| if reversed { nvars - 1 - (r * a + c) } else { r * a + c };
        let mut rows = Vec::new();
        for r in 0..b {
            for c in 0..a {
                // (A·J_a)[r][c] = A[r][c+1];  (J_b·A)[r][c] = A[r-1][c].
                let mut row = vec![f.zero(); nvars];
                if c + 1 < a {
                    row[var(r, c + 1)] = f.add(&row[var(r, c + 1)], &f.one());
                }
                if r >= 1 {
                    row[var(r - 1, c)] = f.sub(&row[var(r - 1, c)], &f.one());
                }
                rows.push(row);
            }
        }
        let m = ExactMatrix::from_rows(f, nvars, rows).expect("rows have nvars entries");
        m.nullspace().into_iter().map(|v| (0..b).map(|r| v[var(r, 0)].clone()).collect()).collect()
    }

    fn len_of(&self, i: usize) -> usize {
        self.lengths[i]
    }
}

/// dim stHom(M_i, M_j) over k[x]/(x^(n+1)).
pub fn an_stable_dim(n: usize, i: usize, j: usize) -> usize {
    i.min(j) - (i + j).saturating_sub(n + 1)
}

impl RingModel for AnModel {
    fn field(&self) -> FieldSpec {
        self.spec.field
    }

    fn points(&self) -> &[PointInfo] {
        &self.points
    }

    fn degrees(&self, _i: usize, _j: usize) -> Vec<i64> {
        vec![0]
    }

    fn hom_basis(&self, i: usize, j: usize, _degree: i64, reversed: bool) -> Vec<Vec<Scalar>> {
        self.maps_between_lengths(self.len_of(i), self.len_of(j), reversed)
    }

    fn null_span(&self, i: usize, j: usize, _degree: i64) -> Vec<Vec<Scalar>> {
        let (a, b) = (self.len_of(i), self.len_of(j));
        let into_free = self.maps_between_lengths(a, self.free(), false);
        let out_of_free = self.maps_between_lengths(self.free(), b, false);
        let mut out = Vec::new();
        for v in &into_free {
            for w in &out_of_free {
                out.push(self.multiply(w, v, b));
            }
        }
        out
    }

    fn compose(&self, _i: usize, _j: usize, k: usize, g: &Rep, f: &Rep) -> Rep {
        Rep { degree: 0, coords: self.multiply(&g.coords, &f.coords, self.len_of(k)) }
    }

    fn identity(&self, i: usize) -> Rep {
        let f = self.spec.field;
        let mut v = vec![f.zero(); self.len_of(i)];
        v[0] = f.one();
        Rep { degree: 0, coords: v }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hom_dimensions_are_min_lengths() {
        let m = AnModel::new(ArtinianRingSpec { n: 4, field: FieldSpec::default_prime() }).unwrap();
        for a in 1..=5 {
            for b in 1..=5 {
                assert_eq!(m.maps_between_lengths(a, b, false).len(), a.min(b));
                assert_eq!(m.maps_between_lengths(a, b, true).len(), a.min(b));
            }
        }
    }

    #[test]
    fn closed_form_small_cases() {
        assert_eq!(an_stable_dim(1, 1, 1), 1);
        assert_eq!(an_stable_dim(2, 1, 2), 1);
        assert_eq!(an_stable_dim(2, 2, 2), 1);
        assert_eq!(an_stable_dim(4, 2, 3), 2);
    }
}
