use super::DenseVector;
use crate::Scalar;

/// A bounded linear map between finite-dimensional spaces together with its adjoint.
pub trait LinearOperator<T: Scalar>: Send + Sync {
    fn domain_dim(&self) -> usize;
    fn codomain_dim(&self) -> usize;
    fn apply(&self, x: &DenseVector<T>) -> DenseVector<T>;
    fn adjoint_apply(&self, y: &DenseVector<T>) -> DenseVector<T>;

    /// Known upper bound on the operator norm, if any.
    fn norm_bound(&self) -> Option<T> {
        None
    }
}

impl<T: Scalar, L: LinearOperator<T> + ?Sized> LinearOperator<T> for std::sync::Arc<L> {
    fn domain_dim(&self) -> usize {
        (**self).domain_dim()
    }
    fn codomain_dim(&self) -> usize {
        (**self).codomain_dim()
    }
    fn apply(&self, x: &DenseVector<T>) -> DenseVector<T> {
        (**self).apply(x)
    }
    fn adjoint_apply(&self, y: &DenseVector<T>) -> DenseVector<T> {
        (**self).adjoint_apply(y)
    }
    fn norm_bound(&self) -> Option<T> {
        (**self).norm_bound()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityOperator {
    pub dim: usize,
}

impl<T: Scalar> LinearOperator<T> for IdentityOperator {
    fn domain_dim(&self) -> usize {
        self.dim
    }
    fn codomain_dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &DenseVector<T>) -> DenseVector<T> {
        x.clone()
    }
    fn adjoint_apply(&self, y: &DenseVector<T>) -> DenseVector<T> {
        y.clone()
    }
    fn norm_bound(&self) -> Option<T> {
        Some(T::one())
    }
}

/// The zero map `R^domain -> R^codomain`.
///
/// Only used to check that structurally absent operators and explicit zero
/// operators produce the same iterates.
#[derive(Debug, Clone, Copy)]
pub struct ZeroOperator {
    pub domain: usize,
    pub codomain: usize,
}

impl<T: Scalar> LinearOperator<T> for ZeroOperator {
    fn domain_dim(&self) -> usize {
        self.domain
    }
    fn codomain_dim(&self) -> usize {
        self.codomain
    }
    fn apply(&self, _x: &DenseVector<T>) -> DenseVector<T> {
        DenseVector::zeros(self.codomain)
    }
    fn adjoint_apply(&self, _y: &DenseVector<T>) -> DenseVector<T> {
        DenseVector::zeros(self.domain)
    }
    fn norm_bound(&self) -> Option<T> {
        Some(T::zero())
    }
}

#[derive(Debug, Clone)]
pub struct DiagonalOperator<T> {
    pub diag: Vec<T>,
}

impl<T: Scalar> LinearOperator<T> for DiagonalOperator<T> {
    fn domain_dim(&self) -> usize {
        self.diag.len()
    }
    fn codomain_dim(&self) -> usize {
        self.diag.len()
    }
    fn apply(&self, x: &DenseVector<T>) -> DenseVector<T> {
        DenseVector::from_fn(self.diag.len(), |i| self.diag[i] * x[i])
    }
    fn adjoint_apply(&self, y: &DenseVector<T>) -> DenseVector<T> {
        self.apply(y)
    }
    fn norm_bound(&self) -> Option<T> {
        Some(self.diag.iter().fold(T::zero(), |m, d| m.max(d.abs())))
    }
}
