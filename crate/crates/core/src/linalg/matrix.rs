use crate::error::{Error, Result};

use super::field::{FieldSpec, Scalar};

/// Dense row-major matrix over an exact field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: ExactMatrix,
    pub pivots: Vec<usize>,
}

impl ExactMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        ExactMatrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: FieldSpec, cols: usize, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend(r);
        }
        Ok(ExactMatrix { field, rows: n, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(field: FieldSpec, rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column {j} has the wrong length");
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect();
        Self::from_rows(field, cols, rows).expect("ragged literal")
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| self.field.is_zero(v))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !f.is_zero(b) {
                        let idx = i * out.cols + j;
                        f.mul_add_assign(&mut out.data[idx], a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !f.is_zero(a) && !f.is_zero(b) {
                        f.mul_add_assign(&mut acc, a, b);
                    }
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &ExactMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!("hstack of {} and {} rows", self.rows, other.rows)));
        }
        let mut out = Self::zeros(self.field, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &ExactMatrix) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("vstack of {} and {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(ExactMatrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Gauss-Jordan elimination; pivots are chosen as the first nonzero entry
    /// scanning columns left to right, so the result is deterministic.
    pub fn rref(&self) -> Echelon {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = f.neg(m.get(i, c));
                for j in c..m.cols {
                    let pv = m.get(r, j).clone();
                    if f.is_zero(&pv) {
                        continue;
                    }
                    let idx = i * m.cols + j;
                    f.mul_add_assign(&mut m.data[idx], &factor, &pv);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Surjectivity of the map into a space of dimension `rows`.
    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    /// Solves `self * x = b`. Free variables are set to zero, so the answer is
    /// the unique solution supported on the pivot columns of `self`.
    pub fn solve_right(&self, b: &ExactMatrix) -> Result<Option<ExactMatrix>> {
        if self.rows != b.rows {
            return Err(Error::Dimension(format!(
                "solve_right: lhs has {} rows, rhs has {}",
                self.rows, b.rows
            )));
        }
        let aug = self.hstack(b)?;
        let ech = aug.rref();
        if ech.pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = Self::zeros(self.field, self.cols, b.cols);
        for (r, &c) in ech.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(c, j, ech.matrix.get(r, self.cols + j).clone());
            }
        }
        Ok(Some(x))
    }

    /// Basis of the right kernel, one vector per free column, in column order.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let f = self.field;
        let ech = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &ech.pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![f.zero(); self.cols];
                v[free] = f.one();
                for (r, &c) in ech.pivots.iter().enumerate() {
                    v[c] = f.neg(ech.matrix.get(r, free));
                }
                v
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn rank_examples() {
        let f = gf(5);
        assert_eq!(ExactMatrix::identity(f, 2).rank(), 2);
        assert_eq!(ExactMatrix::zeros(f, 3, 4).rank(), 0);
        assert_eq!(ExactMatrix::from_i64(f, &[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn surjectivity_examples() {
        let f = gf(7);
        assert!(ExactMatrix::zeros(f, 0, 3).is_surjective());
        assert!(!ExactMatrix::from_i64(f, &[&[1], &[3]]).is_surjective());
        assert!(ExactMatrix::from_i64(f, &[&[1, 0, 2], &[0, 1, 5]]).is_surjective());
    }

    #[test]
    fn solve_right_examples() {
        let f = gf(3);
        let b = ExactMatrix::from_i64(f, &[&[2, 1], &[0, 1]]);
        let x = ExactMatrix::identity(f, 2).solve_right(&b).unwrap().unwrap();
        assert_eq!(x, b);

        let nonzero = ExactMatrix::from_i64(f, &[&[1], &[0]]);
        assert!(ExactMatrix::zeros(f, 2, 2).solve_right(&nonzero).unwrap().is_none());

        let a = ExactMatrix::from_i64(f, &[&[1, 1]]);
        let x = a.solve_right(&ExactMatrix::from_i64(f, &[&[1]])).unwrap().unwrap();
        assert_eq!(x, ExactMatrix::from_i64(f, &[&[1], &[0]]));

        assert!(a.solve_right(&ExactMatrix::zeros(f, 2, 1)).is_err());
    }

    #[test]
    fn nullspace_is_annihilated() {
        let f = gf(11);
        let a = ExactMatrix::from_i64(f, &[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 0, 1]]);
        let ker = a.nullspace();
        assert_eq!(ker.len(), 4 - a.rank());
        for v in ker {
            assert!(a.mul_vec(&v).iter().all(|s| f.is_zero(s)));
        }
    }

    #[test]
    fn rational_elimination() {
        let q = FieldSpec::Rational;
        let a = ExactMatrix::from_i64(q, &[&[2, 1], &[4, 3]]);
        let b = ExactMatrix::from_i64(q, &[&[1], &[0]]);
        let x = a.solve_right(&b).unwrap().unwrap();
        assert_eq!(a.mul(&x).unwrap(), b);
        assert_eq!(q.format(x.get(0, 0)), "3/2");
    }
}
