//! Forward-primal-dual-half-forward and its primal-dual special cases.

use crate::engine::MethodKernel;
use crate::error::{Error, Inequality, Result};
use crate::linalg::DenseVector;
use crate::operators::{DualBlock, SplitProblem};
use crate::Scalar;

/// Flattened primal-dual iterate `[x; u]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualPoint<T> {
    pub x: DenseVector<T>,
    pub u: DenseVector<T>,
}

impl<T: Scalar> PrimalDualPoint<T> {
    pub fn split(z: &DenseVector<T>, primal_dim: usize) -> Self {
        let (x, u) = z.split_at(primal_dim);
        Self { x, u }
    }

    pub fn flatten(&self) -> DenseVector<T> {
        DenseVector::concat(&self.x, &self.u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Variant {
    Fpdhf,
    CondatVu,
    ChambollePock,
    CpFbf,
}

/// ```text
/// x_n     = J_{tau A}(p - tau (L* q + D p + C p))
/// w_{n+1} = x_n - tau (D x_n - D p)
/// v_{n+1} = J_{sigma B^-1}(q + sigma L (x_n + w_{n+1} - p))
/// ```
/// with `(x_n, v_{n+1})` and `(w_{n+1}, v_{n+1})` returned as the warped pair.
/// Absent `C` or `D` terms are skipped, which is all that distinguishes the
/// special cases.
#[derive(Clone)]
pub struct PrimalDualKernel<T: Scalar> {
    problem: SplitProblem<T>,
    tau: T,
    sigma: T,
    variant: Variant,
}

fn check_steps<T: Scalar>(problem: &SplitProblem<T>, tau: T, sigma: T) -> Result<()> {
    if !(tau > T::zero() && tau.is_finite() && sigma > T::zero() && sigma.is_finite()) {
        return Err(Error::infeasible(
            Inequality::ParameterDomain,
            format!("tau = {tau} and sigma = {sigma} must be positive"),
        ));
    }
    let l = problem.norm_l();
    if !(sigma * tau * l * l < T::one()) {
        return Err(Error::infeasible(
            Inequality::DualStepProduct,
            format!("sigma tau ||L||^2 = {}", sigma * tau * l * l),
        ));
    }
    Ok(())
}

fn require_dual<T: Scalar>(problem: &SplitProblem<T>, method: &'static str) -> Result<()> {
    if problem.dual().is_none() {
        return Err(Error::Structure {
            method,
            reason: "B and L are absent; use the primal kernels (fbhf, fbf, fb)".into(),
        });
    }
    Ok(())
}

impl<T: Scalar> PrimalDualKernel<T> {
    fn build(problem: &SplitProblem<T>, tau: T, sigma: T, variant: Variant, method: &'static str) -> Result<Self> {
        require_dual(problem, method)?;
        let forbid = |present: bool, what: &str| -> Result<()> {
            if present {
                Err(Error::Structure { method, reason: format!("{what} must be absent") })
            } else {
                Ok(())
            }
        };
        match variant {
            Variant::Fpdhf => {}
            Variant::CondatVu => forbid(problem.lipschitz().is_some(), "D")?,
            Variant::ChambollePock => {
                forbid(problem.cocoercive().is_some(), "C")?;
                forbid(problem.lipschitz().is_some(), "D")?;
            }
            Variant::CpFbf => forbid(problem.cocoercive().is_some(), "C")?,
        }
        check_steps(problem, tau, sigma)?;
        Ok(Self { problem: problem.clone(), tau, sigma, variant })
    }

    pub fn tau(&self) -> T {
        self.tau
    }
    pub fn sigma(&self) -> T {
        self.sigma
    }
    pub fn problem(&self) -> &SplitProblem<T> {
        &self.problem
    }

    fn dual(&self) -> &DualBlock<T> {
        self.problem.dual().expect("checked at construction")
    }
}

pub fn kernel_fpdhf<T: Scalar>(problem: &SplitProblem<T>, tau: T, sigma: T) -> Result<PrimalDualKernel<T>> {
    PrimalDualKernel::build(problem, tau, sigma, Variant::Fpdhf, "fpdhf")
}

pub fn kernel_condat_vu<T: Scalar>(problem: &SplitProblem<T>, tau: T, sigma: T) -> Result<PrimalDualKernel<T>> {
    PrimalDualKernel::build(problem, tau, sigma, Variant::CondatVu, "cv")
}

pub fn kernel_chambolle_pock<T: Scalar>(problem: &SplitProblem<T>, tau: T, sigma: T) -> Result<PrimalDualKernel<T>> {
    PrimalDualKernel::build(problem, tau, sigma, Variant::ChambollePock, "cp")
}

pub fn kernel_cp_fbf<T: Scalar>(problem: &SplitProblem<T>, tau: T, sigma: T) -> Result<PrimalDualKernel<T>> {
    PrimalDualKernel::build(problem, tau, sigma, Variant::CpFbf, "cp-fbf")
}

/// `<a, S b>` with `S(x, u) = (x - tau L* u, -tau L x + (tau / sigma) u)`.
pub(crate) fn primal_dual_metric<T: Scalar>(
    problem: &SplitProblem<T>,
    tau: T,
    sigma: T,
    a: &DenseVector<T>,
    b: &DenseVector<T>,
) -> T {
    let n = problem.primal_dim();
    let dual = problem.dual().expect("primal-dual metric needs L");
    let a = PrimalDualPoint::split(a, n);
    let b = PrimalDualPoint::split(b, n);
    let l_bx = dual.linear.apply(&b.x);
    let l_ax = dual.linear.apply(&a.x);
    a.x.dot(&b.x) - tau * (a.u.dot(&l_bx) + l_ax.dot(&b.u)) + tau / sigma * a.u.dot(&b.u)
}

impl<T: Scalar> MethodKernel<T> for PrimalDualKernel<T> {
    fn name(&self) -> &'static str {
        match self.variant {
            Variant::Fpdhf => "fpdhf",
            Variant::CondatVu => "cv",
            Variant::ChambollePock => "cp",
            Variant::CpFbf => "cp-fbf",
        }
    }

    fn dim(&self) -> usize {
        self.problem.primal_dim() + self.problem.dual_dim()
    }

    fn warp_step(&self, y: &DenseVector<T>, _n: usize) -> (DenseVector<T>, DenseVector<T>) {
        let (tau, sigma) = (self.tau, self.sigma);
        let dual = self.dual();
        let PrimalDualPoint { x: p, u: q } = PrimalDualPoint::split(y, self.problem.primal_dim());

        let mut forward = dual.linear.adjoint_apply(&q);
        let dp = self.problem.lipschitz().map(|d| d.eval(&p));
        if let Some(dp) = &dp {
            forward += dp;
        }
        if let Some(c) = self.problem.cocoercive() {
            forward += &c.eval(&p);
        }
        let mut arg = p.clone();
        arg.axpy(-tau, &forward);
        let x = self.problem.resolvent_a().resolve(&arg, tau);

        let w = match (&dp, self.problem.lipschitz()) {
            (Some(dp), Some(d)) => {
                let mut corr = d.eval(&x);
                corr -= dp;
                let mut w = x.clone();
                w.axpy(-tau, &corr);
                w
            }
            _ => x.clone(),
        };

        let mut lead = &x + &w;
        lead -= &p;
        let mut dual_arg = q;
        dual_arg.axpy(sigma, &dual.linear.apply(&lead));
        let v = dual.resolvent_b_inv.resolve(&dual_arg, sigma);

        (DenseVector::concat(&x, &v), DenseVector::concat(&w, &v))
    }

    fn metric_weight(&self, a: &DenseVector<T>, b: &DenseVector<T>) -> T {
        primal_dual_metric(&self.problem, self.tau, self.sigma, a, b)
    }
}
