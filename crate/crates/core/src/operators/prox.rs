//! Resolvents and proximity operators.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::Scalar;

/// Resolvent `J_{step A} = (Id + step A)^-1` of a maximally monotone operator `A`.
pub trait Resolvent<T: Scalar>: Send + Sync {
    fn resolve(&self, x: &DenseVector<T>, step: T) -> DenseVector<T>;
}

pub type ResolventHandle<T> = Arc<dyn Resolvent<T>>;

impl<T: Scalar, F> Resolvent<T> for F
where
    F: Fn(&DenseVector<T>, T) -> DenseVector<T> + Send + Sync,
{
    fn resolve(&self, x: &DenseVector<T>, step: T) -> DenseVector<T> {
        self(x, step)
    }
}

pub fn project_box<T: Scalar>(x: &DenseVector<T>, lo: T, hi: T) -> Result<DenseVector<T>> {
    if lo > hi {
        return Err(Error::invalid(format!("empty box: lo {lo} > hi {hi}")));
    }
    Ok(x.map(|v| v.max(lo).min(hi)))
}

pub fn project_nonneg<T: Scalar>(x: &DenseVector<T>) -> DenseVector<T> {
    x.map(|v| v.max(T::zero()))
}

/// `prox_{t ||.||_1}`: componentwise `sign(x) max(|x| - t, 0)`.
pub fn soft_threshold<T: Scalar>(x: &DenseVector<T>, t: T) -> DenseVector<T> {
    debug_assert!(t >= T::zero());
    x.map(|v| {
        let m = v.abs() - t;
        if m > T::zero() {
            v.signum() * m
        } else {
            T::zero()
        }
    })
}

/// Moreau decomposition: `J_{sigma B^-1}(u) = u - sigma J_{B/sigma}(u / sigma)`,
/// where `j_b` evaluates `J_{step B}`.
pub fn resolvent_of_inverse<T: Scalar>(
    j_b: &dyn Resolvent<T>,
    u: &DenseVector<T>,
    sigma: T,
) -> DenseVector<T> {
    debug_assert!(sigma > T::zero());
    let inner = j_b.resolve(&u.scaled(T::one() / sigma), T::one() / sigma);
    let mut out = u.clone();
    out.axpy(-sigma, &inner);
    out
}

/// Normal cone of a box `[lo, hi]^n`; its resolvent is the projection.
#[derive(Debug, Clone, Copy)]
pub struct BoxProjection<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Resolvent<T> for BoxProjection<T> {
    fn resolve(&self, x: &DenseVector<T>, _step: T) -> DenseVector<T> {
        x.map(|v| v.max(self.lo).min(self.hi))
    }
}

/// Normal cone of the nonnegative orthant.
#[derive(Debug, Clone, Copy, Default)]
pub struct NonnegProjection;

impl<T: Scalar> Resolvent<T> for NonnegProjection {
    fn resolve(&self, x: &DenseVector<T>, _step: T) -> DenseVector<T> {
        project_nonneg(x)
    }
}

/// Subdifferential of `weight * ||.||_1`; resolvent is soft thresholding at `step * weight`.
#[derive(Debug, Clone, Copy)]
pub struct L1Prox<T> {
    pub weight: T,
}

impl<T: Scalar> Resolvent<T> for L1Prox<T> {
    fn resolve(&self, x: &DenseVector<T>, step: T) -> DenseVector<T> {
        soft_threshold(x, step * self.weight)
    }
}

/// Projection onto the l-infinity ball of `radius`: the resolvent of the
/// inverse subdifferential of `radius * ||.||_1` (for every step).
#[derive(Debug, Clone, Copy)]
pub struct LInfBallProjection<T> {
    pub radius: T,
}

impl<T: Scalar> Resolvent<T> for LInfBallProjection<T> {
    fn resolve(&self, x: &DenseVector<T>, _step: T) -> DenseVector<T> {
        x.map(|v| v.max(-self.radius).min(self.radius))
    }
}

/// Resolvent of the zero operator (the identity).
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityResolvent;

impl<T: Scalar> Resolvent<T> for IdentityResolvent {
    fn resolve(&self, x: &DenseVector<T>, _step: T) -> DenseVector<T> {
        x.clone()
    }
}

/// Resolvent of `B^-1` built from a resolvent of `B` via [`resolvent_of_inverse`].
#[derive(Clone)]
pub struct MoreauInverse<T: Scalar> {
    pub inner: ResolventHandle<T>,
}

impl<T: Scalar> Resolvent<T> for MoreauInverse<T> {
    fn resolve(&self, u: &DenseVector<T>, sigma: T) -> DenseVector<T> {
        resolvent_of_inverse(self.inner.as_ref(), u, sigma)
    }
}

/// Block-diagonal operator `A1 x A2` on `R^split x R^rest`.
#[derive(Clone)]
pub struct BlockResolvent<T: Scalar> {
    pub split: usize,
    pub first: ResolventHandle<T>,
    pub second: ResolventHandle<T>,
}

impl<T: Scalar> Resolvent<T> for BlockResolvent<T> {
    fn resolve(&self, x: &DenseVector<T>, step: T) -> DenseVector<T> {
        let (a, b) = x.split_at(self.split);
        DenseVector::concat(&self.first.resolve(&a, step), &self.second.resolve(&b, step))
    }
}
