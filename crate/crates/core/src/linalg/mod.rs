//! Exact linear algebra over a prime field or the rationals.
//!
//! Every rank, surjectivity and solvability decision made elsewhere in the
//! crate bottoms out here.

mod field;
mod matrix;
mod subspace;

pub use field::{FieldSpec, Scalar, DEFAULT_PRIME};
pub use matrix::{Echelon, ExactMatrix};
pub use subspace::Subspace;

/// Rank of `m` over its field.
pub fn rank(m: &ExactMatrix) -> usize {
    m.rank()
}

/// Whether `m`, read as a map into a space of dimension `m.rows()`, is onto.
pub fn is_surjective(m: &ExactMatrix) -> bool {
    m.is_surjective()
}

pub fn solve_right(a: &ExactMatrix, b: &ExactMatrix) -> crate::Result<Option<ExactMatrix>> {
    a.solve_right(b)
}

pub(crate) fn zero_vec(field: FieldSpec, n: usize) -> Vec<Scalar> {
    vec![field.zero(); n]
}

pub(crate) fn is_zero_vec(field: FieldSpec, v: &[Scalar]) -> bool {
    v.iter().all(|s| field.is_zero(s))
}

/// `acc += c * v`.
pub(crate) fn axpy(field: FieldSpec, acc: &mut [Scalar], c: &Scalar, v: &[Scalar]) {
    if field.is_zero(c) {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !field.is_zero(x) {
            field.mul_add_assign(a, c, x);
        }
    }
}
