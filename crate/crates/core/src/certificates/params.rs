//! Step-size constants and the certificate built from them.

use serde::Serialize;

use crate::error::{Error, Inequality, Result};
use crate::Scalar;

use super::formulas::{
    alpha_bound, delta_constant, lambda_interval, phi_value, psi_value, rho_value, AlphaBound,
    NuMode, OpenInterval,
};

/// Validated step parameters of a (possibly primal-dual) forward-half-forward method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepParams<T> {
    pub epsilon: T,
    /// `tau` for FPDHF and FBHF, `gamma` for forward-backward.
    pub tau: T,
    pub sigma: T,
    pub norm_l: T,
    pub beta: T,
    pub zeta: T,
    pub beta_tilde: T,
    pub zeta_tilde: T,
    pub nu: T,
    pub nu_mode: NuMode,
}

/// `beta_tilde = beta (1 - sigma tau ||L||^2)`, `zeta_tilde = tau zeta / sqrt(1 - sigma tau ||L||^2)`,
/// then checks `1 - zeta_tilde^2 - eps > 0` and `tau <= 2 beta_tilde eps`.
pub fn fpdhf_constants<T: Scalar>(
    beta: T,
    zeta: T,
    tau: T,
    sigma: T,
    norm_l: T,
    epsilon: T,
    nu_mode: NuMode,
) -> Result<StepParams<T>> {
    if !(tau > T::zero() && tau.is_finite()) {
        return Err(Error::infeasible(Inequality::ParameterDomain, format!("tau = {tau} must be positive")));
    }
    if !(sigma >= T::zero() && sigma.is_finite()) {
        return Err(Error::infeasible(Inequality::ParameterDomain, format!("sigma = {sigma} must be nonnegative")));
    }
    if !(beta > T::zero()) || !(zeta >= T::zero() && zeta.is_finite()) || !(norm_l >= T::zero()) {
        return Err(Error::infeasible(
            Inequality::ParameterDomain,
            format!("beta = {beta} must be positive, zeta = {zeta} and ||L|| = {norm_l} nonnegative"),
        ));
    }
    let slack = T::one() - sigma * tau * norm_l * norm_l;
    if !(slack > T::zero()) {
        return Err(Error::infeasible(
            Inequality::DualStepProduct,
            format!("sigma tau ||L||^2 = {}", T::one() - slack),
        ));
    }
    let beta_tilde = beta * slack;
    let zeta_tilde = tau * zeta / slack.sqrt();
    let params = StepParams {
        epsilon,
        tau,
        sigma,
        norm_l,
        beta,
        zeta,
        beta_tilde,
        zeta_tilde,
        nu: nu_mode.nu(zeta_tilde),
        nu_mode,
    };
    params.validate()?;
    Ok(params)
}

impl<T: Scalar> StepParams<T> {
    /// Forward-backward with `M = S / gamma`: `zeta = nu = 0`, default `eps = gamma / (2 beta)`.
    pub fn forward_backward(beta: T, gamma: T, epsilon: Option<T>) -> Result<Self> {
        if !(gamma > T::zero()) {
            return Err(Error::infeasible(Inequality::ParameterDomain, format!("gamma = {gamma} must be positive")));
        }
        if beta.is_finite() && !(gamma < T::lit(2.0) * beta) {
            return Err(Error::infeasible(
                Inequality::ForwardBackwardStep,
                format!("gamma = {gamma}, 2 beta = {}", T::lit(2.0) * beta),
            ));
        }
        let epsilon = match epsilon {
            Some(e) => e,
            None if beta.is_finite() => gamma / (T::lit(2.0) * beta),
            None => {
                return Err(Error::invalid("forward-backward without C needs an explicit eps"));
            }
        };
        fpdhf_constants(beta, T::zero(), gamma, T::zero(), T::zero(), epsilon, NuMode::Monotone)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > T::zero() && self.epsilon < T::one()) {
            return Err(Error::infeasible(
                Inequality::ParameterDomain,
                format!("eps = {} outside ]0, 1[", self.epsilon),
            ));
        }
        let margin = T::one() - self.zeta_tilde * self.zeta_tilde - self.epsilon;
        if !(margin > T::zero()) {
            return Err(Error::infeasible(
                Inequality::EpsilonBelowOneMinusZetaSq,
                format!("1 - zeta_tilde^2 - eps = {margin} (zeta_tilde = {}, eps = {})", self.zeta_tilde, self.epsilon),
            ));
        }
        if self.beta_tilde.is_finite() {
            let bound = T::lit(2.0) * self.beta_tilde * self.epsilon;
            if self.tau > bound {
                return Err(Error::infeasible(
                    Inequality::StepBelowCocoercivity,
                    format!("tau = {} > 2 beta_tilde eps = {bound}", self.tau),
                ));
            }
        }
        Ok(())
    }

    pub fn psi(&self) -> T {
        psi_value(self.zeta_tilde, self.epsilon, self.nu_mode)
            .expect("validated parameters give a finite psi")
    }
}

/// Admissibility data for one set of validated step parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate<T> {
    pub params: StepParams<T>,
    pub psi: T,
}

/// JSON-serializable summary of a certified `(alpha, lambda)` choice.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport<T> {
    pub params: StepParams<T>,
    pub psi: T,
    pub alpha: T,
    pub lambda: T,
    pub phi_alpha: T,
    pub lambda_interval: OpenInterval<T>,
    pub alpha_bound: AlphaBound<T>,
    pub rho: T,
    pub delta_hat: T,
    pub feasible: bool,
    pub violated: Option<Inequality>,
}

impl<T: Scalar> Certificate<T> {
    pub fn new(params: StepParams<T>) -> Result<Self> {
        params.validate()?;
        let psi = psi_value(params.zeta_tilde, params.epsilon, params.nu_mode)?;
        Ok(Self { params, psi })
    }

    /// Supremum of admissible constant relaxations for inertia `alpha`.
    pub fn lambda_max(&self, alpha: T) -> Result<T> {
        Ok(phi_value(alpha)? * self.psi)
    }

    pub fn alpha_max(&self, lambda: T) -> AlphaBound<T> {
        alpha_bound(self.psi, lambda)
    }

    pub fn rho(&self, lambda: T) -> T {
        rho_value(self.psi, lambda)
    }

    /// Limit of `delta_n` for constant `alpha`, `lambda`.
    pub fn delta_hat(&self, alpha: T, lambda: T) -> T {
        delta_constant(alpha, self.rho(lambda))
    }

    /// Checks a constant `(alpha, lambda)` pair; feasible iff `phi(alpha) psi > lambda`.
    pub fn certify(&self, alpha: T, lambda: T) -> Result<CertificateReport<T>> {
        let report = self.report(alpha, lambda)?;
        match report.violated {
            None => Ok(report),
            Some(Inequality::AlphaInterval) => Err(Error::infeasible(
                Inequality::AlphaInterval,
                format!("alpha = {alpha} >= alpha_bar = {} for lambda = {lambda}", report.alpha_bound.value),
            )),
            Some(ineq) => Err(Error::infeasible(
                ineq,
                format!("lambda = {lambda} not in ]0, {}[ for alpha = {alpha}", report.lambda_interval.hi),
            )),
        }
    }

    /// Like [`Certificate::certify`] but returns the report even when infeasible.
    pub fn report(&self, alpha: T, lambda: T) -> Result<CertificateReport<T>> {
        let phi_alpha = phi_value(alpha)?;
        let interval = lambda_interval(self.psi, alpha)?;
        let bound = self.alpha_max(lambda);
        let feasible = interval.contains(lambda);
        let violated = if feasible {
            None
        } else if bound.feasible {
            Some(Inequality::AlphaInterval)
        } else {
            Some(Inequality::LambdaInterval)
        };
        Ok(CertificateReport {
            params: self.params,
            psi: self.psi,
            alpha,
            lambda,
            phi_alpha,
            lambda_interval: interval,
            alpha_bound: bound,
            rho: self.rho(lambda),
            delta_hat: self.delta_hat(alpha, lambda),
            feasible,
            violated,
        })
    }
}
