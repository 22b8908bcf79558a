//! Primal-only kernels: forward-backward-half-forward, Tseng's FBF and forward-backward.

use crate::engine::MethodKernel;
use crate::error::{Error, Inequality, Result};
use crate::linalg::DenseVector;
use crate::operators::SplitProblem;
use crate::Scalar;

use super::init::chi_value;

/// ```text
/// x_n     = J_{tau A}(p - tau (D p + C p))
/// w_{n+1} = x_n - tau (D x_n - D p)
/// ```
/// on the primal space with `S = Id`. With `C` absent this is Tseng's method.
#[derive(Clone)]
pub struct FbhfKernel<T: Scalar> {
    problem: SplitProblem<T>,
    tau: T,
}

fn require_primal<T: Scalar>(problem: &SplitProblem<T>, method: &'static str) -> Result<()> {
    if problem.dual().is_some() {
        return Err(Error::Structure { method, reason: "B and L must be absent".into() });
    }
    Ok(())
}

/// Requires `tau in ]0, chi[` with `chi = 4 beta / (1 + sqrt(1 + 16 beta^2 zeta^2))`.
pub fn kernel_fbhf<T: Scalar>(problem: &SplitProblem<T>, tau: T) -> Result<FbhfKernel<T>> {
    require_primal(problem, "fbhf")?;
    let chi = chi_value(problem.beta(), problem.zeta());
    if !(tau > T::zero() && tau < chi) {
        return Err(Error::infeasible(Inequality::StepBelowChi, format!("tau = {tau}, chi = {chi}")));
    }
    Ok(FbhfKernel { problem: problem.clone(), tau })
}

/// Forward-backward-forward: [`kernel_fbhf`] with `C` absent.
pub fn kernel_fbf<T: Scalar>(problem: &SplitProblem<T>, tau: T) -> Result<FbhfKernel<T>> {
    if problem.cocoercive().is_some() {
        return Err(Error::Structure { method: "fbf", reason: "C must be absent".into() });
    }
    kernel_fbhf(problem, tau)
}

impl<T: Scalar> FbhfKernel<T> {
    pub fn tau(&self) -> T {
        self.tau
    }
}

impl<T: Scalar> MethodKernel<T> for FbhfKernel<T> {
    fn name(&self) -> &'static str {
        if self.problem.cocoercive().is_some() {
            "fbhf"
        } else {
            "fbf"
        }
    }

    fn dim(&self) -> usize {
        self.problem.primal_dim()
    }

    fn warp_step(&self, p: &DenseVector<T>, _n: usize) -> (DenseVector<T>, DenseVector<T>) {
        let tau = self.tau;
        let mut forward = DenseVector::zeros(p.len());
        let dp = self.problem.lipschitz().map(|d| d.eval(p));
        if let Some(dp) = &dp {
            forward += dp;
        }
        if let Some(c) = self.problem.cocoercive() {
            forward += &c.eval(p);
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
        (x, w)
    }

    fn metric_weight(&self, a: &DenseVector<T>, b: &DenseVector<T>) -> T {
        a.dot(b)
    }
}

/// `x_n = J_{gamma A}(y - gamma C y)`, `w_{n+1} = x_n`.
#[derive(Clone)]
pub struct FbKernel<T: Scalar> {
    problem: SplitProblem<T>,
    gamma: T,
}

/// Requires `D`, `B`, `L` absent and `gamma < 2 beta`.
pub fn kernel_fb<T: Scalar>(problem: &SplitProblem<T>, gamma: T) -> Result<FbKernel<T>> {
    require_primal(problem, "fb")?;
    if problem.lipschitz().is_some() {
        return Err(Error::Structure { method: "fb", reason: "D must be absent".into() });
    }
    let two_beta = T::lit(2.0) * problem.beta();
    if !(gamma > T::zero() && gamma < two_beta) {
        return Err(Error::infeasible(
            Inequality::ForwardBackwardStep,
            format!("gamma = {gamma}, 2 beta = {two_beta}"),
        ));
    }
    Ok(FbKernel { problem: problem.clone(), gamma })
}

impl<T: Scalar> MethodKernel<T> for FbKernel<T> {
    fn name(&self) -> &'static str {
        "fb"
    }

    fn dim(&self) -> usize {
        self.problem.primal_dim()
    }

    fn warp_step(&self, y: &DenseVector<T>, _n: usize) -> (DenseVector<T>, DenseVector<T>) {
        let mut arg = y.clone();
        if let Some(c) = self.problem.cocoercive() {
            arg.axpy(-self.gamma, &c.eval(y));
        }
        let x = self.problem.resolvent_a().resolve(&arg, self.gamma);
        (x.clone(), x)
    }

    fn metric_weight(&self, a: &DenseVector<T>, b: &DenseVector<T>) -> T {
        a.dot(b)
    }
}
