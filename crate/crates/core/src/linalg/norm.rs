use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{DenseVector, LinearOperator};
use crate::error::{Error, Result};
use crate::Scalar;

/// Relative change below which the power method stops early.
pub const POWER_METHOD_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormEstimate<T> {
    pub value: T,
    pub iterations: usize,
    /// `true` when the iteration cap was reached before the relative-change test passed.
    pub cap_hit: bool,
}

/// Largest singular value of `op` by power iteration on `op^* op`.
///
/// Every iterate `x_k` is a unit vector, so `||op x_k||` is a lower bound on
/// `||op||`; the running maximum of these bounds is returned, which makes the
/// estimate nondecreasing in `iters` for a fixed seed.
pub fn op_norm_estimate<T: Scalar>(
    op: &dyn LinearOperator<T>,
    dim: usize,
    iters: usize,
    seed: u64,
) -> Result<T> {
    Ok(op_norm_report(op, dim, iters, seed)?.value)
}

pub fn op_norm_report<T: Scalar>(
    op: &dyn LinearOperator<T>,
    dim: usize,
    iters: usize,
    seed: u64,
) -> Result<NormEstimate<T>> {
    if dim != op.domain_dim() {
        return Err(Error::DimensionMismatch {
            expected: op.domain_dim(),
            got: dim,
        });
    }
    if iters == 0 {
        return Err(Error::invalid("power method needs at least one iteration"));
    }
    if dim == 0 {
        return Ok(NormEstimate {
            value: T::zero(),
            iterations: 0,
            cap_hit: false,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = DenseVector::from_fn(dim, |_| {
        let v: f64 = StandardNormal.sample(&mut rng);
        T::lit(v)
    });
    let n0 = x.norm();
    x.scale_mut(T::one() / n0);

    let rtol = T::lit(POWER_METHOD_RTOL);
    let mut best = T::zero();
    let mut prev = T::zero();
    for k in 1..=iters {
        let y = op.apply(&x);
        let est = y.norm();
        best = best.max(est);
        if k > 1 && (est - prev).abs() <= rtol * est.max(T::min_positive_value()) {
            return Ok(NormEstimate {
                value: best,
                iterations: k,
                cap_hit: false,
            });
        }
        prev = est;
        let mut z = op.adjoint_apply(&y);
        let nz = z.norm();
        if nz == T::zero() {
            return Ok(NormEstimate {
                value: best,
                iterations: k,
                cap_hit: false,
            });
        }
        z.scale_mut(T::one() / nz);
        x = z;
    }
    Ok(NormEstimate {
        value: best,
        iterations: iters,
        cap_hit: true,
    })
}
