//! Minimal dense square-matrix arithmetic.
//!
//! Charts stay small (dimension rarely above 4, never above 8 in practice),
//! so a flat row-major buffer with straightforward loops beats pulling in a
//! linear-algebra dependency. Only the operations the transport integrator
//! and the metric checks actually need are provided.

use crate::scalar::{to_f64, Scalar};

/// Dense square matrix over the working scalar type, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, T::one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `rows.len()`.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.set(i, j, out.get(i, j) + a * rhs.get(k, j));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.dim, v.len(), "matrix-vector dimension mismatch");
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &x)| acc + a * x)
            })
            .collect()
    }

    /// `self += c * other`, entrywise.
    pub fn axpy(&mut self, c: T, other: &Self) {
        assert_eq!(self.dim, other.dim, "axpy dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + c * b;
        }
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&a| a * c).collect(),
        }
    }

    /// Determinant via LU elimination with partial pivoting.
    pub fn det(&self) -> T {
        let n = self.dim;
        let mut m = self.data.clone();
        let mut det = T::one();
        for col in 0..n {
            let mut pivot = col;
            for r in col + 1..n {
                if m[r * n + col].abs() > m[pivot * n + col].abs() {
                    pivot = r;
                }
            }
            let p = m[pivot * n + col];
            if p == T::zero() {
                return T::zero();
            }
            if pivot != col {
                for j in 0..n {
                    m.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            det = det * p;
            for r in col + 1..n {
                let factor = m[r * n + col] / p;
                if factor == T::zero() {
                    continue;
                }
                for j in col..n {
                    m[r * n + j] = m[r * n + j] - factor * m[col * n + j];
                }
            }
        }
        det
    }

    /// Largest entrywise absolute difference to another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "comparison dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    /// Largest absolute deviation from symmetry, `max |m_ij - m_ji|`.
    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Rows as owned vectors, mainly for diagnostics.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.row(i).iter().map(|&v| to_f64(v)).collect())
            .collect()
    }
}
