#![allow(dead_code)]

use std::sync::Arc;

use nfb_core::experiments::{normal_matrix, normal_vector, rng_from_seed};
use nfb_core::linalg::{op_norm_estimate, DenseMatrix, DenseVector, ZeroOperator};
use nfb_core::operators::{
    BoxProjection, DualBlock, FnMap, LInfBallProjection, LeastSquaresGradient, SmoothConstant, SplitProblem, ZeroMap,
};

pub const PRIMAL: usize = 20;
pub const DUAL: usize = 8;

pub struct Parts {
    pub m: DenseMatrix<f64>,
    pub b: DenseVector<f64>,
    pub l: DenseMatrix<f64>,
    pub k: DenseMatrix<f64>,
    pub norm_m: f64,
    pub norm_l: f64,
    pub norm_k: f64,
}

/// Seeded data: least-squares term `M`, coupling `L`, and a skew matrix `K` for `D`.
pub fn parts(seed: u64) -> Parts {
    let mut rng = rng_from_seed(seed);
    let m = normal_matrix(&mut rng, 12, PRIMAL);
    let b = normal_vector(&mut rng, 12);
    let l = normal_matrix(&mut rng, DUAL, PRIMAL);
    let s: DenseMatrix<f64> = normal_matrix(&mut rng, PRIMAL, PRIMAL);
    let k = DenseMatrix::from_fn(PRIMAL, PRIMAL, |i, j| s.get(i, j) - s.get(j, i));
    let norm_m = op_norm_estimate(&m, PRIMAL, 5000, seed).unwrap() * 1.001;
    let norm_l = op_norm_estimate(&l, PRIMAL, 5000, seed).unwrap() * 1.001;
    let norm_k = op_norm_estimate(&k, PRIMAL, 5000, seed).unwrap() * 1.001;
    Parts { m, b, l, k, norm_m, norm_l, norm_k }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Real,
    /// Present but identically zero.
    Zero,
    Absent,
}

/// `A = N_[-1,1]`; `J_{sigma B^-1}` = projection onto the 0.5 l-inf ball;
/// `C` least squares, `D = K` skew, each real, zero or absent.
pub fn problem(p: &Parts, c: Part, d: Part, dual: Part) -> SplitProblem<f64> {
    let mut prob = SplitProblem::new(PRIMAL, Arc::new(BoxProjection { lo: -1.0, hi: 1.0 }));
    match dual {
        Part::Real => {
            prob = prob
                .with_dual(DualBlock {
                    resolvent_b_inv: Arc::new(LInfBallProjection { radius: 0.5 }),
                    linear: Arc::new(p.l.clone()),
                    norm_l: p.norm_l,
                })
                .unwrap()
        }
        Part::Zero => {
            prob = prob
                .with_dual(DualBlock {
                    resolvent_b_inv: Arc::new(|u: &DenseVector<f64>, _s: f64| DenseVector::zeros(u.len())),
                    linear: Arc::new(ZeroOperator { domain: PRIMAL, codomain: DUAL }),
                    norm_l: 0.0,
                })
                .unwrap()
        }
        Part::Absent => {}
    }
    let beta = 1.0 / (p.norm_m * p.norm_m);
    match c {
        Part::Real => {
            prob = prob
                .with_cocoercive(Arc::new(LeastSquaresGradient::new(p.m.clone(), p.b.clone(), p.norm_m).unwrap()))
                .unwrap()
        }
        Part::Zero => {
            prob = prob.with_cocoercive(Arc::new(ZeroMap { constant: SmoothConstant::Cocoercive(beta) })).unwrap()
        }
        Part::Absent => {}
    }
    match d {
        Part::Real => {
            let k = p.k.clone();
            prob = prob
                .with_lipschitz(Arc::new(FnMap::new(
                    move |x: &DenseVector<f64>| k.matvec(x).unwrap(),
                    SmoothConstant::Lipschitz(p.norm_k),
                )))
                .unwrap()
        }
        Part::Zero => {
            prob = prob.with_lipschitz(Arc::new(ZeroMap { constant: SmoothConstant::Lipschitz(p.norm_k) })).unwrap()
        }
        Part::Absent => {}
    }
    prob
}

pub fn full(p: &Parts) -> SplitProblem<f64> {
    problem(p, Part::Real, Part::Real, Part::Real)
}

pub fn start(seed: u64, dim: usize) -> DenseVector<f64> {
    let mut rng = rng_from_seed(seed ^ 0x5eed);
    normal_vector(&mut rng, dim)
}

/// Saddle point of `1/2 ||M x - b||^2 + i_[0,1]^N(x) + <u, R x>` over `u >= 0`,
/// by a plain Condat-Vu loop in nalgebra, stopped when an update moves less than `tol`.
pub fn qp_saddle_oracle(m: &DenseMatrix<f64>, b: &DenseVector<f64>, r: &DenseMatrix<f64>, tol: f64, max_iters: usize) -> (DenseVector<f64>, usize) {
    use nalgebra::{DMatrix, DVector};
    let mm = DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
    let rr = DMatrix::from_row_slice(r.rows(), r.cols(), r.as_slice());
    let bb = DVector::from_column_slice(b.as_slice());
    let norm_m = mm.clone().svd(false, false).singular_values.max();
    let norm_r = rr.clone().svd(false, false).singular_values.max();
    let tau = 1.0 / (norm_m * norm_m + norm_r);
    let sigma = 0.5 / norm_r;
    let mt = mm.transpose();
    let rt = rr.transpose();
    let mut x = DVector::<f64>::zeros(m.cols());
    let mut u = DVector::<f64>::zeros(r.rows());
    let mut iters = 0;
    for k in 0..max_iters {
        iters = k + 1;
        let g = &mt * (&mm * &x - &bb) + &rt * &u;
        let x_new = (&x - g * tau).map(|v| v.clamp(0.0, 1.0));
        let u_new = (&u + (&rr * (&x_new * 2.0 - &x)) * sigma).map(|v| v.max(0.0));
        let step = (&x_new - &x).norm() + (&u_new - &u).norm();
        x = x_new;
        u = u_new;
        if step < tol {
            break;
        }
    }
    let z: Vec<f64> = x.iter().chain(u.iter()).copied().collect();
    (DenseVector::from_vec(z), iters)
}

/// `||z - P(z - F z)||` for `F(x, u) = (M^T(Mx - b) + R^T u, -R x)`, `P` the projection onto `[0,1]^N x R_+^p`.
pub fn qp_natural_residual(m: &DenseMatrix<f64>, b: &DenseVector<f64>, r: &DenseMatrix<f64>, z: &DenseVector<f64>) -> f64 {
    let n = m.cols();
    let (x, u) = z.split_at(n);
    let res = &m.matvec(&x).unwrap() - b;
    let gx = &m.matvec_t(&res).unwrap() + &r.matvec_t(&u).unwrap();
    let gu = -r.matvec(&x).unwrap();
    let px = DenseVector::from_fn(n, |i| (x[i] - gx[i]).clamp(0.0, 1.0));
    let pu = DenseVector::from_fn(u.len(), |i| (u[i] - gu[i]).max(0.0));
    ((&x - &px).norm_sq() + (&u - &pu).norm_sq()).sqrt()
}
