//! Single-valued smooth maps (cocoercive or Lipschitz) and their constants.

use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{DenseMatrix, DenseVector};
use crate::Scalar;

/// Regularity constant of a smooth map, tagged by role.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "role", content = "value", rename_all = "snake_case")]
pub enum SmoothConstant<T> {
    /// `beta`-cocoercive; also `1/beta`-Lipschitz.
    Cocoercive(T),
    /// `zeta`-Lipschitz.
    Lipschitz(T),
}

impl<T: Scalar> SmoothConstant<T> {
    pub fn value(&self) -> T {
        match *self {
            SmoothConstant::Cocoercive(v) | SmoothConstant::Lipschitz(v) => v,
        }
    }

    /// Lipschitz constant implied by the tag.
    pub fn lipschitz(&self) -> T {
        match *self {
            SmoothConstant::Cocoercive(b) => T::one() / b,
            SmoothConstant::Lipschitz(z) => z,
        }
    }
}

pub trait SmoothMap<T: Scalar>: Send + Sync {
    fn eval(&self, x: &DenseVector<T>) -> DenseVector<T>;
    fn constant(&self) -> SmoothConstant<T>;
}

pub type SmoothMapHandle<T> = Arc<dyn SmoothMap<T>>;

/// Closure-backed smooth map.
pub struct FnMap<T, F> {
    f: F,
    constant: SmoothConstant<T>,
}

impl<T: Scalar, F> FnMap<T, F>
where
    F: Fn(&DenseVector<T>) -> DenseVector<T> + Send + Sync,
{
    pub fn new(f: F, constant: SmoothConstant<T>) -> Self {
        Self { f, constant }
    }
}

impl<T: Scalar, F> SmoothMap<T> for FnMap<T, F>
where
    F: Fn(&DenseVector<T>) -> DenseVector<T> + Send + Sync,
{
    fn eval(&self, x: &DenseVector<T>) -> DenseVector<T> {
        (self.f)(x)
    }
    fn constant(&self) -> SmoothConstant<T> {
        self.constant
    }
}

/// The zero map. Any positive constant is valid for it, so the caller picks one.
#[derive(Debug, Clone, Copy)]
pub struct ZeroMap<T> {
    pub constant: SmoothConstant<T>,
}

impl<T: Scalar> SmoothMap<T> for ZeroMap<T> {
    fn eval(&self, x: &DenseVector<T>) -> DenseVector<T> {
        DenseVector::zeros(x.len())
    }
    fn constant(&self) -> SmoothConstant<T> {
        self.constant
    }
}

/// Huber function `H_delta(t) = t^2/(2 delta)` for `|t| <= delta`, `|t| - delta/2` otherwise, summed.
pub fn huber_value<T: Scalar>(x: &DenseVector<T>, delta: T) -> T {
    let half = T::lit(0.5);
    x.iter()
        .map(|&t| {
            let a = t.abs();
            if a <= delta {
                t * t / (delta + delta)
            } else {
                a - half * delta
            }
        })
        .sum()
}

pub fn huber_gradient<T: Scalar>(x: &DenseVector<T>, delta: T) -> DenseVector<T> {
    debug_assert!(delta > T::zero());
    x.map(|t| if t.abs() <= delta { t / delta } else { t.signum() })
}

/// `M^T (M x - b)`.
pub fn least_squares_gradient<T: Scalar>(
    m: &DenseMatrix<T>,
    b: &DenseVector<T>,
    x: &DenseVector<T>,
) -> Result<DenseVector<T>> {
    b.check_len(m.rows())?;
    let mut r = m.matvec(x)?;
    r -= b;
    m.matvec_t(&r)
}

/// `(R^T u, -R x)`.
pub fn skew_constraint_map<T: Scalar>(
    r: &DenseMatrix<T>,
    x: &DenseVector<T>,
    u: &DenseVector<T>,
) -> Result<(DenseVector<T>, DenseVector<T>)> {
    let top = r.matvec_t(u)?;
    let bottom = -r.matvec(x)?;
    Ok((top, bottom))
}

/// `x -> M^T (M x - b)`, `||M||^-2`-cocoercive.
#[derive(Debug, Clone)]
pub struct LeastSquaresGradient<T> {
    pub m: DenseMatrix<T>,
    pub b: DenseVector<T>,
    pub beta: T,
}

impl<T: Scalar> LeastSquaresGradient<T> {
    /// `norm_m` is an estimate of `||M||`.
    pub fn new(m: DenseMatrix<T>, b: DenseVector<T>, norm_m: T) -> Result<Self> {
        b.check_len(m.rows())?;
        Ok(Self { m, b, beta: T::one() / (norm_m * norm_m) })
    }
}

impl<T: Scalar> SmoothMap<T> for LeastSquaresGradient<T> {
    fn eval(&self, x: &DenseVector<T>) -> DenseVector<T> {
        let mut r = self.m.matvec_unchecked(x.as_slice());
        r -= &self.b;
        self.m.matvec_t_unchecked(r.as_slice())
    }
    fn constant(&self) -> SmoothConstant<T> {
        SmoothConstant::Cocoercive(self.beta)
    }
}

/// `(x, u) -> (M^T (M x - b), 0)` on `R^N x R^p`.
#[derive(Debug, Clone)]
pub struct PrimalLeastSquares<T> {
    pub inner: LeastSquaresGradient<T>,
    pub dual_dim: usize,
}

impl<T: Scalar> SmoothMap<T> for PrimalLeastSquares<T> {
    fn eval(&self, z: &DenseVector<T>) -> DenseVector<T> {
        let (x, _) = z.split_at(self.inner.m.cols());
        DenseVector::concat(&self.inner.eval(&x), &DenseVector::zeros(self.dual_dim))
    }
    fn constant(&self) -> SmoothConstant<T> {
        self.inner.constant()
    }
}

/// `(x, u) -> (R^T u, -R x)`, `||R||`-Lipschitz and skew.
#[derive(Debug, Clone)]
pub struct SkewConstraintMap<T> {
    pub r: DenseMatrix<T>,
    pub norm_r: T,
}

impl<T: Scalar> SmoothMap<T> for SkewConstraintMap<T> {
    fn eval(&self, z: &DenseVector<T>) -> DenseVector<T> {
        let (x, u) = z.split_at(self.r.cols());
        let top = self.r.matvec_t_unchecked(u.as_slice());
        let bottom = -self.r.matvec_unchecked(x.as_slice());
        DenseVector::concat(&top, &bottom)
    }
    fn constant(&self) -> SmoothConstant<T> {
        SmoothConstant::Lipschitz(self.norm_r)
    }
}
