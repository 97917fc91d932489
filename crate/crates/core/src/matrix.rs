//! Dense exact matrices over a [`FieldTag`], with the row-reduction kernel
//! used by homology, page-turning and injectivity checks.
//!
//! Matrices act on column vectors: an `r x c` matrix maps a `c`-dimensional
//! space into an `r`-dimensional one. Rank and kernel are computed by
//! Gauss-Jordan elimination with exact pivots; there is no epsilon anywhere.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldTag, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldTag,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>, // row-major
}

impl Matrix {
    pub fn zeros(field: FieldTag, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldTag, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Build from integer rows; every row must have the same length.
    pub fn from_rows(field: FieldTag, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let mut m = Matrix::zeros(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, field.from_i64(v));
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> FieldTag {
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

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| s.is_zero())
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).clone();
                    out.set(i, j, f.add(&cur, &f.mul(a, b)));
                }
            }
        }
        Ok(out)
    }

    /// Reduced row-echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = f.inv(m.get(row, col));
            for j in col..m.cols {
                let v = f.mul(m.get(row, j), &inv);
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for j in col..m.cols {
                    let v = f.sub(m.get(r, j), &f.mul(&factor, m.get(row, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// Basis of the kernel, one column vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let f = self.field;
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(row, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} into {}x{}",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let f = self.field;
        let mut out = vec![f.zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j).is_zero() && !v[j].is_zero() {
                    out[i] = f.add(&out[i], &f.mul(self.get(i, j), &v[j]));
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "{}", rows.join(" ; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity_and_zero() {
        let f = FieldTag::rationals();
        assert_eq!(Matrix::identity(f, 4).rank(), 4);
        assert_eq!(Matrix::zeros(f, 3, 5).rank(), 0);
        assert_eq!(Matrix::zeros(f, 3, 5).kernel_dim(), 5);
    }

    #[test]
    fn rank_with_fractions() {
        let f = FieldTag::rationals();
        // second row is 3/2 times the first
        let m = Matrix::from_rows(f, &[vec![2, 4], vec![3, 6]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_mod_p_differs_from_rational_rank() {
        // determinant 7: invertible over the rationals, singular mod 7
        let rows = vec![vec![1, 3], vec![-2, 1]];
        let q = Matrix::from_rows(FieldTag::rationals(), &rows).unwrap();
        let f7 = Matrix::from_rows(FieldTag::prime(7).unwrap(), &rows).unwrap();
        assert_eq!(q.rank(), 2);
        assert_eq!(f7.rank(), 1);
    }

    #[test]
    fn kernel_vectors_are_killed() {
        let f = FieldTag::rationals();
        let m = Matrix::from_rows(f, &[vec![1, 2, 3], vec![2, 4, 6]]).unwrap();
        let basis = m.kernel_basis();
        assert_eq!(basis.len(), 2);
        for v in basis {
            assert!(m.apply(&v).unwrap().iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn composition_shapes_are_checked() {
        let f = FieldTag::rationals();
        let a = Matrix::zeros(f, 2, 3);
        let b = Matrix::zeros(f, 2, 3);
        assert!(a.mul(&b).is_err());
    }
}
