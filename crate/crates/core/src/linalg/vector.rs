use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

/// Owned dense vector of real scalars.
///
/// [`DenseVector::new`] rejects non-finite entries. Arithmetic helpers do not
/// re-check, so iterates that blow up can be detected by [`DenseVector::is_finite`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DenseVector<T> {
    data: Vec<T>,
}

impl<T: Scalar> DenseVector<T> {
    pub fn new(data: Vec<T>) -> Result<Self> {
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { data })
    }

    /// Wraps `data` without the finiteness check.
    pub fn from_vec(data: Vec<T>) -> Self {
        Self { data }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            data: vec![T::zero(); len],
        }
    }

    pub fn filled(len: usize, value: T) -> Self {
        Self {
            data: vec![value; len],
        }
    }

    /// Unit basis vector `e_index` in dimension `len`.
    pub fn basis(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.data[index] = T::one();
        v
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> T) -> Self {
        Self {
            data: (0..len).map(f).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                got: self.len(),
            })
        }
    }

    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn norm_inf(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn norm_l1(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m + v.abs())
    }

    pub fn dist_sq(&self, other: &Self) -> T {
        debug_assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        debug_assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: T, x: &Self) {
        debug_assert_eq!(self.len(), x.len());
        for (s, &v) in self.data.iter_mut().zip(&x.data) {
            *s += a * v;
        }
    }

    pub fn scale_mut(&mut self, a: T) {
        for s in &mut self.data {
            *s *= a;
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        self.map(|v| a * v)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Splits into `(self[..at], self[at..])`.
    pub fn split_at(&self, at: usize) -> (Self, Self) {
        let (a, b) = self.data.split_at(at);
        (Self::from_vec(a.to_vec()), Self::from_vec(b.to_vec()))
    }

    pub fn concat(a: &Self, b: &Self) -> Self {
        let mut data = Vec::with_capacity(a.len() + b.len());
        data.extend_from_slice(&a.data);
        data.extend_from_slice(&b.data);
        Self { data }
    }

    /// Converts to another scalar type.
    pub fn cast<U: Scalar>(&self) -> DenseVector<U> {
        DenseVector::from_vec(
            self.data
                .iter()
                .map(|v| U::lit(v.to_f64_lossy()))
                .collect(),
        )
    }
}

impl<T> Index<usize> for DenseVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for DenseVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[i]
    }
}

impl<T: Scalar> From<Vec<T>> for DenseVector<T> {
    fn from(data: Vec<T>) -> Self {
        Self::from_vec(data)
    }
}

impl<'a, T: Scalar> Add<&'a DenseVector<T>> for &'a DenseVector<T> {
    type Output = DenseVector<T>;
    fn add(self, rhs: &'a DenseVector<T>) -> DenseVector<T> {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl<'a, T: Scalar> Sub<&'a DenseVector<T>> for &'a DenseVector<T> {
    type Output = DenseVector<T>;
    fn sub(self, rhs: &'a DenseVector<T>) -> DenseVector<T> {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Mul<T> for &DenseVector<T> {
    type Output = DenseVector<T>;
    fn mul(self, rhs: T) -> DenseVector<T> {
        self.scaled(rhs)
    }
}

impl<T: Scalar> Neg for &DenseVector<T> {
    type Output = DenseVector<T>;
    fn neg(self) -> DenseVector<T> {
        self.map(|v| -v)
    }
}

impl<T: Scalar> Neg for DenseVector<T> {
    type Output = DenseVector<T>;
    fn neg(mut self) -> DenseVector<T> {
        self.data.iter_mut().for_each(|v| *v = -*v);
        self
    }
}

impl<T: Scalar> AddAssign<&DenseVector<T>> for DenseVector<T> {
    fn add_assign(&mut self, rhs: &DenseVector<T>) {
        self.axpy(T::one(), rhs);
    }
}

impl<T: Scalar> SubAssign<&DenseVector<T>> for DenseVector<T> {
    fn sub_assign(&mut self, rhs: &DenseVector<T>) {
        self.axpy(-T::one(), rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = DenseVector::new(vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 1 }));
        assert!(DenseVector::new(vec![0.0f32, f32::INFINITY]).is_err());
    }

    #[test]
    fn basic_arithmetic() {
        let a = DenseVector::from_vec(vec![1.0, 2.0, 3.0]);
        let b = DenseVector::from_vec(vec![0.5, -1.0, 2.0]);
        assert_eq!((&a + &b).as_slice(), &[1.5, 1.0, 5.0]);
        assert_eq!((&a - &b).as_slice(), &[0.5, 3.0, 1.0]);
        assert_eq!(a.dot(&b), 0.5 - 2.0 + 6.0);
        assert_eq!(a.norm_inf(), 3.0);
        let (l, r) = a.split_at(1);
        assert_eq!(DenseVector::concat(&l, &r), a);
    }
}
