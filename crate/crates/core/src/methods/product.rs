//! The primal-dual method written literally as a warped resolvent on the product space.
//!
//! ```text
//! M(x, u) = (x/tau - D x - L* u, -L x + tau L D x + u/sigma)
//! S(x, u) = (x - tau L* u, -tau L x + (tau/sigma) u)
//! T(x, u) = (x/tau - D x, u/tau)
//! ```
//! with `M = S T`. Used as an oracle for [`super::kernel_fpdhf`].

use crate::engine::MethodKernel;
use crate::error::Result;
use crate::linalg::DenseVector;
use crate::operators::SplitProblem;
use crate::Scalar;

use super::primal_dual::{kernel_fpdhf, primal_dual_metric, PrimalDualPoint};

fn d_or_zero<T: Scalar>(problem: &SplitProblem<T>, x: &DenseVector<T>) -> DenseVector<T> {
    problem.lipschitz().map_or_else(|| DenseVector::zeros(x.len()), |d| d.eval(x))
}

/// `T(x, u) = (x / tau - D x, u / tau)`.
pub fn product_t<T: Scalar>(problem: &SplitProblem<T>, tau: T, z: &DenseVector<T>) -> DenseVector<T> {
    let PrimalDualPoint { x, u } = PrimalDualPoint::split(z, problem.primal_dim());
    let top = &x.scaled(T::one() / tau) - &d_or_zero(problem, &x);
    DenseVector::concat(&top, &u.scaled(T::one() / tau))
}

/// `S(x, u) = (x - tau L* u, -tau L x + (tau / sigma) u)`.
pub fn product_s<T: Scalar>(problem: &SplitProblem<T>, tau: T, sigma: T, z: &DenseVector<T>) -> DenseVector<T> {
    let dual = problem.dual().expect("product-space operators need L");
    let PrimalDualPoint { x, u } = PrimalDualPoint::split(z, problem.primal_dim());
    let top = &x - &dual.linear.adjoint_apply(&u).scaled(tau);
    let bottom = &u.scaled(tau / sigma) - &dual.linear.apply(&x).scaled(tau);
    DenseVector::concat(&top, &bottom)
}

/// `M(x, u) = (x/tau - D x - L* u, -L x + tau L D x + u/sigma)`.
pub fn product_m<T: Scalar>(problem: &SplitProblem<T>, tau: T, sigma: T, z: &DenseVector<T>) -> DenseVector<T> {
    let dual = problem.dual().expect("product-space operators need L");
    let PrimalDualPoint { x, u } = PrimalDualPoint::split(z, problem.primal_dim());
    let dx = d_or_zero(problem, &x);
    let top = &(&x.scaled(T::one() / tau) - &dx) - &dual.linear.adjoint_apply(&u);
    let bottom = &(&dual.linear.apply(&dx).scaled(tau) - &dual.linear.apply(&x)) + &u.scaled(T::one() / sigma);
    DenseVector::concat(&top, &bottom)
}

/// Quadratic form `<z, S z> = ||x||^2 - 2 tau <L x, u> + (tau / sigma) ||u||^2`.
pub fn product_s_form<T: Scalar>(problem: &SplitProblem<T>, tau: T, sigma: T, z: &DenseVector<T>) -> T {
    primal_dual_metric(problem, tau, sigma, z, z)
}

/// Computes `x = (M + A)^-1 (M - C) y` by the closed-form sequence
/// `r = p/tau - D p - C p - L* q`, `s = tau L D p - L p + q/sigma`,
/// `x = J_{tau A}(tau r)`, `v = J_{sigma B^-1}(sigma (s + 2 L x - tau L D x))`,
/// then `w = y - tau (T y - T x)`.
#[derive(Clone)]
pub struct ProductKernel<T: Scalar> {
    problem: SplitProblem<T>,
    tau: T,
    sigma: T,
}

pub fn kernel_nfb_product<T: Scalar>(problem: &SplitProblem<T>, tau: T, sigma: T) -> Result<ProductKernel<T>> {
    kernel_fpdhf(problem, tau, sigma)?;
    Ok(ProductKernel { problem: problem.clone(), tau, sigma })
}

impl<T: Scalar> MethodKernel<T> for ProductKernel<T> {
    fn name(&self) -> &'static str {
        "fpdhf-oracle"
    }

    fn dim(&self) -> usize {
        self.problem.primal_dim() + self.problem.dual_dim()
    }

    fn warp_step(&self, y: &DenseVector<T>, _n: usize) -> (DenseVector<T>, DenseVector<T>) {
        let (tau, sigma) = (self.tau, self.sigma);
        let problem = &self.problem;
        let dual = problem.dual().expect("checked at construction");
        let PrimalDualPoint { x: p, u: q } = PrimalDualPoint::split(y, problem.primal_dim());

        let dp = d_or_zero(problem, &p);
        let mut r = &p.scaled(T::one() / tau) - &dp;
        if let Some(c) = problem.cocoercive() {
            r -= &c.eval(&p);
        }
        r -= &dual.linear.adjoint_apply(&q);
        let s = &(&dual.linear.apply(&dp).scaled(tau) - &dual.linear.apply(&p)) + &q.scaled(T::one() / sigma);

        let x = problem.resolvent_a().resolve(&r.scaled(tau), tau);
        let dx = d_or_zero(problem, &x);
        let mut dual_arg = s;
        dual_arg.axpy(T::lit(2.0), &dual.linear.apply(&x));
        dual_arg.axpy(-tau, &dual.linear.apply(&dx));
        let v = dual.resolvent_b_inv.resolve(&dual_arg.scaled(sigma), sigma);

        let bold_x = DenseVector::concat(&x, &v);
        let mut w = y.clone();
        let gap = &product_t(problem, tau, y) - &product_t(problem, tau, &bold_x);
        w.axpy(-tau, &gap);
        (bold_x, w)
    }

    fn metric_weight(&self, a: &DenseVector<T>, b: &DenseVector<T>) -> T {
        primal_dual_metric(&self.problem, self.tau, self.sigma, a, b)
    }
}
