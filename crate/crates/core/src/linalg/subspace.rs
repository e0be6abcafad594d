use super::field::{FieldSpec, Scalar};
use super::matrix::ExactMatrix;

/// A subspace of `field^ambient` kept in echelon form for incremental
/// insertion and membership tests.
///
/// Rows are normalized (leading entry 1, zeros left of it) and sorted by
/// pivot column. Reducing a vector by the rows in pivot order clears every
/// pivot column.
#[derive(Clone, Debug)]
pub struct Subspace {
    field: FieldSpec,
    ambient: usize,
    rows: Vec<(usize, Vec<Scalar>)>,
    spanning: Vec<Vec<Scalar>>,
}

impl Subspace {
    pub fn new(field: FieldSpec, ambient: usize) -> Self {
        Subspace { field, ambient, rows: Vec::new(), spanning: Vec::new() }
    }

    pub fn spanned_by<'a>(field: FieldSpec, ambient: usize, vectors: impl IntoIterator<Item = &'a Vec<Scalar>>) -> Self {
        let mut s = Self::new(field, ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Remainder of `v` after clearing all pivot columns.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.ambient, "vector length does not match ambient dimension");
        let f = self.field;
        let mut w = v.to_vec();
        for (c, row) in &self.rows {
            if f.is_zero(&w[*c]) {
                continue;
            }
            let factor = f.neg(&w[*c]);
            for j in *c..self.ambient {
                if !f.is_zero(&row[j]) {
                    f.mul_add_assign(&mut w[j], &factor, &row[j]);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let f = self.field;
        self.reduce(v).iter().all(|s| f.is_zero(s))
    }

    /// Adds `v` to the span. Returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let f = self.field;
        let w = self.reduce(v);
        let Some(c) = w.iter().position(|s| !f.is_zero(s)) else {
            return false;
        };
        let inv = f.inv(&w[c]).expect("leading entry is nonzero");
        let row: Vec<Scalar> = w.iter().map(|s| f.mul(s, &inv)).collect();
        let at = self.rows.partition_point(|(p, _)| *p < c);
        self.rows.insert(at, (c, row));
        self.spanning.push(v.to_vec());
        true
    }

    /// The inserted vectors that increased the dimension, in insertion order.
    /// These form a basis.
    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.spanning
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(c, _)| *c).collect()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.spanning.iter().all(|v| other.contains(v))
    }

    pub fn equals(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(other)
    }

    /// Matrix whose columns are the basis vectors.
    pub fn basis_matrix(&self) -> ExactMatrix {
        ExactMatrix::from_columns(self.field, self.ambient, &self.spanning)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_tracks_dimension() {
        let f = FieldSpec::prime(5).unwrap();
        let v = |xs: &[i64]| xs.iter().map(|&x| f.from_i64(x)).collect::<Vec<_>>();
        let mut s = Subspace::new(f, 3);
        assert!(s.insert(&v(&[0, 1, 2])));
        assert!(s.insert(&v(&[1, 1, 0])));
        assert!(!s.insert(&v(&[2, 4, 4])));
        assert!(s.contains(&v(&[1, 2, 2])));
        assert!(!s.contains(&v(&[0, 0, 1])));
        assert_eq!(s.dim(), 2);
        assert!(s.insert(&v(&[0, 0, 3])));
        assert_eq!(s.pivots(), vec![0, 1, 2]);
    }
}
