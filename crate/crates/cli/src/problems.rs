//! Seeded primal-dual test problem shared by `equiv-test` and `sweep`.
//!
//! `A = N_[-1,1]^n`, `B^-1` = normal cone of the `0.5` l-inf ball,
//! `C = grad 1/2 ||M x - b||^2`, `D = K` skew, `L` dense.

use std::sync::Arc;

use nfb_core::experiments::{normal_matrix, normal_vector, rng_from_seed};
use nfb_core::linalg::{op_norm_estimate, DenseMatrix, DenseVector};
use nfb_core::operators::{
    BoxProjection, DualBlock, FnMap, LInfBallProjection, LeastSquaresGradient, SmoothConstant, SplitProblem,
};
use nfb_core::Result;

const NORM_ITERS: usize = 5000;
/// Relative inflation of the power-method estimates, which approach from below.
const NORM_MARGIN: f64 = 1e-3;

pub struct PdProblem {
    pub problem: SplitProblem<f64>,
    pub z0: DenseVector<f64>,
}

pub fn pd_problem(primal: usize, dual: usize, rows: usize, seed: u64) -> Result<PdProblem> {
    if primal == 0 || dual == 0 || rows == 0 {
        return Err(nfb_core::Error::invalid("primal, dual and rows must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let m: DenseMatrix<f64> = normal_matrix(&mut rng, rows, primal);
    let b: DenseVector<f64> = normal_vector(&mut rng, rows);
    let l: DenseMatrix<f64> = normal_matrix(&mut rng, dual, primal);
    let s: DenseMatrix<f64> = normal_matrix(&mut rng, primal, primal);
    let k = DenseMatrix::from_fn(primal, primal, |i, j| s.get(i, j) - s.get(j, i));
    let z0 = normal_vector(&mut rng, primal + dual);
    let bound = |op: &DenseMatrix<f64>, salt: u64| -> Result<f64> {
        Ok(op_norm_estimate(op, primal, NORM_ITERS, seed.wrapping_add(salt))? * (1.0 + NORM_MARGIN))
    };
    let (norm_m, norm_l, norm_k) = (bound(&m, 1)?, bound(&l, 2)?, bound(&k, 3)?);
    let problem = SplitProblem::new(primal, Arc::new(BoxProjection { lo: -1.0, hi: 1.0 }))
        .with_dual(DualBlock {
            resolvent_b_inv: Arc::new(LInfBallProjection { radius: 0.5 }),
            linear: Arc::new(l),
            norm_l,
        })?
        .with_cocoercive(Arc::new(LeastSquaresGradient::new(m, b, norm_m)?))?
        .with_lipschitz(Arc::new(FnMap::new(
            move |x: &DenseVector<f64>| k.matvec(x).expect("square skew matrix"),
            SmoothConstant::Lipschitz(norm_k),
        )))?;
    Ok(PdProblem { problem, z0 })
}
