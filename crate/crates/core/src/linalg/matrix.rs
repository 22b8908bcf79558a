use serde::{Deserialize, Serialize};

use super::{DenseVector, LinearOperator};
use crate::error::{Error, Result};
use crate::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged rows"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { T::zero() })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `M x`
    pub fn matvec(&self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        x.check_len(self.cols)?;
        Ok(self.matvec_unchecked(x.as_slice()))
    }

    /// `M^T y`
    pub fn matvec_t(&self, y: &DenseVector<T>) -> Result<DenseVector<T>> {
        y.check_len(self.rows)?;
        Ok(self.matvec_t_unchecked(y.as_slice()))
    }

    pub(crate) fn matvec_unchecked(&self, x: &[T]) -> DenseVector<T> {
        DenseVector::from_fn(self.rows, |i| {
            self.row(i)
                .iter()
                .zip(x)
                .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
        })
    }

    pub(crate) fn matvec_t_unchecked(&self, y: &[T]) -> DenseVector<T> {
        let mut out = vec![T::zero(); self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        DenseVector::from_vec(out)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `M M^T` (rows x rows).
    pub fn gram_rows(&self) -> Self {
        let n = self.rows;
        let mut g = Self::from_fn(n, n, |_, _| T::zero());
        for i in 0..n {
            for j in 0..=i {
                let v = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
                g.data[i * n + j] = v;
                g.data[j * n + i] = v;
            }
        }
        g
    }

    /// Smallest pivot of the Cholesky factorization of a symmetric matrix,
    /// relative to the largest diagonal entry. `None` if the factorization
    /// breaks down (matrix not positive definite).
    pub fn cholesky_min_pivot_ratio(&self) -> Option<T> {
        let n = self.rows;
        if n != self.cols {
            return None;
        }
        let mut l = vec![T::zero(); n * n];
        let mut min_pivot = T::infinity();
        let max_diag = (0..n).fold(T::zero(), |m, i| m.max(self.get(i, i)));
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.get(i, j);
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= T::zero() || !sum.is_finite() {
                        return None;
                    }
                    min_pivot = min_pivot.min(sum);
                    l[i * n + j] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Some(min_pivot / max_diag)
    }
}

impl<T: Scalar> LinearOperator<T> for DenseMatrix<T> {
    fn domain_dim(&self) -> usize {
        self.cols
    }

    fn codomain_dim(&self) -> usize {
        self.rows
    }

    fn apply(&self, x: &DenseVector<T>) -> DenseVector<T> {
        assert_eq!(x.len(), self.cols, "matrix domain mismatch");
        self.matvec_unchecked(x.as_slice())
    }

    fn adjoint_apply(&self, y: &DenseVector<T>) -> DenseVector<T> {
        assert_eq!(y.len(), self.rows, "matrix codomain mismatch");
        self.matvec_t_unchecked(y.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        assert!(DenseMatrix::<f64>::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::<f64>::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn matvec_and_transpose() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let x = DenseVector::from_vec(vec![1.0, 0.0, -1.0]);
        assert_eq!(m.matvec(&x).unwrap().as_slice(), &[-2.0, -2.0]);
        let y = DenseVector::from_vec(vec![1.0, 1.0]);
        assert_eq!(m.matvec_t(&y).unwrap().as_slice(), &[5.0, 7.0, 9.0]);
        assert_eq!(m.transpose().matvec(&y).unwrap(), m.matvec_t(&y).unwrap());
        assert!(m.matvec(&y).is_err());
    }

    #[test]
    fn cholesky_detects_rank_deficiency() {
        let full = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert!(full.gram_rows().cholesky_min_pivot_ratio().unwrap() > 0.5);
        let deficient = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let r = deficient.gram_rows().cholesky_min_pivot_ratio();
        assert!(r.is_none_or(|v| v < 1e-12));
    }
}
