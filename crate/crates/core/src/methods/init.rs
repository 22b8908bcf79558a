//! Step-size initialization from `(t, kappa1, kappa2)`.
//!
//! ```text
//! eps_bar = 2 / (1 + sqrt(1 + 16 beta^2 zeta^2))
//! chi     = 4 beta / (1 + sqrt(1 + 16 beta^2 zeta^2))   (= 2 beta eps_bar = sqrt(1 - eps_bar) / zeta)
//! eps = t eps_bar,  tau = kappa1 chi,  sigma = kappa2 / (tau ||L||^2) (1 - tau / chi)
//! ```

use serde::Serialize;

use crate::certificates::{fpdhf_constants, Certificate, NuMode, StepParams};
use crate::error::{Error, Inequality, Result};
use crate::operators::SplitProblem;
use crate::Scalar;

/// `eps` used when `C` is absent and the cocoercivity bound puts no lower limit on it.
pub const EPSILON_FLOOR: f64 = 1e-6;

/// `eps_bar`; `1` when `zeta = 0`, `0` when `beta = +inf`.
pub fn epsilon_bar<T: Scalar>(beta: T, zeta: T) -> T {
    if zeta == T::zero() {
        return T::one();
    }
    if beta.is_infinite() {
        return T::zero();
    }
    let bz = beta * zeta;
    T::lit(2.0) / (T::one() + (T::one() + T::lit(16.0) * bz * bz).sqrt())
}

/// `chi`; `2 beta` when `zeta = 0`, `1 / zeta` when `beta = +inf`, `+inf` when both.
pub fn chi_value<T: Scalar>(beta: T, zeta: T) -> T {
    if zeta == T::zero() {
        return T::lit(2.0) * beta;
    }
    if beta.is_infinite() {
        return T::one() / zeta;
    }
    let bz = beta * zeta;
    T::lit(4.0) * beta / (T::one() + (T::one() + T::lit(16.0) * bz * bz).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Fix `alpha`, then take `lambda` in `]0, phi(alpha) psi[`.
    PickAlphaThenLambda,
    /// Fix `lambda` in `]0, psi[`, then take `alpha` in `[0, alpha_bar[`.
    PickLambdaThenAlpha,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InitInput<T> {
    pub beta: T,
    pub zeta: T,
    pub norm_l: T,
    pub t: T,
    pub kappa1: T,
    pub kappa2: T,
    pub nu_mode: NuMode,
    pub scenario: Scenario,
    /// `alpha` (scenario 1) or `lambda` (scenario 2); defaults to `0` and `psi / 2`.
    pub chosen: Option<T>,
    /// The dependent parameter; defaults to the midpoint of its admissible interval.
    pub dependent: Option<T>,
}

impl<T: Scalar> InitInput<T> {
    /// Reads `beta`, `zeta`, `||L||` off the problem; `nu = 2 zeta_tilde` only when both `L` and `D` are present.
    pub fn for_problem(problem: &SplitProblem<T>, t: T, kappa1: T, kappa2: T) -> Self {
        let coupled = problem.dual().is_some() && problem.lipschitz().is_some();
        Self {
            beta: problem.beta(),
            zeta: problem.zeta(),
            norm_l: problem.norm_l(),
            t,
            kappa1,
            kappa2,
            nu_mode: if coupled { NuMode::General } else { NuMode::Monotone },
            scenario: Scenario::PickAlphaThenLambda,
            chosen: None,
            dependent: None,
        }
    }

    pub fn scenario(mut self, scenario: Scenario, chosen: Option<T>, dependent: Option<T>) -> Self {
        self.scenario = scenario;
        self.chosen = chosen;
        self.dependent = dependent;
        self
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InitProvenance<T> {
    pub t: T,
    pub kappa1: T,
    pub kappa2: T,
    pub scenario: Scenario,
    /// `eps` was raised from `t eps_bar` to `tau / (2 beta_tilde)` to keep `tau <= 2 beta_tilde eps`.
    pub epsilon_raised: bool,
    /// `beta = +inf`: `eps = t * EPSILON_FLOOR`.
    pub epsilon_floor: bool,
    /// `beta = +inf` and `zeta = 0`: `chi` is free and set to 1.
    pub chi_arbitrary: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InitResult<T> {
    pub epsilon_bar: T,
    pub chi: T,
    pub epsilon: T,
    pub tau: T,
    pub sigma: T,
    pub beta_tilde: T,
    pub zeta_tilde: T,
    pub nu: T,
    pub psi: T,
    pub lambda: T,
    pub alpha: T,
    pub alpha_bar: T,
    pub lambda_max: T,
    pub delta_hat: T,
    pub params: StepParams<T>,
    pub provenance: InitProvenance<T>,
}

impl<T: Scalar> InitResult<T> {
    pub fn certificate(&self) -> Certificate<T> {
        Certificate { params: self.params, psi: self.psi }
    }
}

fn open_unit<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v < T::one() {
        Ok(())
    } else {
        Err(Error::infeasible(Inequality::ParameterDomain, format!("{name} = {v} outside ]0, 1[")))
    }
}

pub fn initialize_fpdhf<T: Scalar>(input: &InitInput<T>) -> Result<InitResult<T>> {
    let InitInput { beta, zeta, norm_l, t, kappa1, kappa2, nu_mode, scenario, chosen, dependent } = *input;
    open_unit("t", t)?;
    open_unit("kappa1", kappa1)?;
    let has_dual = norm_l > T::zero();
    if has_dual {
        open_unit("kappa2", kappa2)?;
    } else if !(kappa2 >= T::zero() && kappa2 < T::one()) {
        return Err(Error::infeasible(Inequality::ParameterDomain, format!("kappa2 = {kappa2} outside [0, 1[")));
    }
    if !(beta > T::zero()) || !(zeta >= T::zero() && zeta.is_finite()) {
        return Err(Error::infeasible(
            Inequality::ParameterDomain,
            format!("beta = {beta} must be positive and zeta = {zeta} finite and nonnegative"),
        ));
    }

    let epsilon_floor = beta.is_infinite();
    let chi_arbitrary = beta.is_infinite() && zeta == T::zero();
    let epsilon_bar = epsilon_bar(beta, zeta);
    let chi = if chi_arbitrary { T::one() } else { chi_value(beta, zeta) };
    let tau = kappa1 * chi;
    let sigma = if has_dual { kappa2 / (tau * norm_l * norm_l) * (T::one() - tau / chi) } else { T::zero() };

    let slack = T::one() - sigma * tau * norm_l * norm_l;
    let beta_tilde = beta * slack;
    let mut epsilon = if epsilon_floor { t * T::lit(EPSILON_FLOOR) } else { t * epsilon_bar };
    let mut epsilon_raised = false;
    if beta_tilde.is_finite() {
        let needed = tau / (T::lit(2.0) * beta_tilde);
        if needed > epsilon {
            // Pad by a few ulps so the rounded product still clears the bound.
            epsilon_raised = needed > epsilon * (T::one() + T::lit(1e-12));
            epsilon = needed * (T::one() + T::lit(8.0) * T::epsilon());
        }
    }

    let params = fpdhf_constants(beta, zeta, tau, sigma, norm_l, epsilon, nu_mode)?;
    let cert = Certificate::new(params)?;
    let psi = cert.psi;

    let (alpha, lambda) = match scenario {
        Scenario::PickAlphaThenLambda => {
            let alpha = chosen.unwrap_or(T::zero());
            let lambda = match dependent {
                Some(l) => l,
                None => T::lit(0.5) * cert.lambda_max(alpha)?,
            };
            (alpha, lambda)
        }
        Scenario::PickLambdaThenAlpha => {
            let lambda = chosen.unwrap_or(T::lit(0.5) * psi);
            let bound = cert.alpha_max(lambda);
            if !bound.feasible {
                return Err(Error::infeasible(
                    Inequality::LambdaInterval,
                    format!("lambda = {lambda} not in ]0, psi = {psi}["),
                ));
            }
            (dependent.unwrap_or(T::lit(0.5) * bound.value), lambda)
        }
    };
    let report = cert.certify(alpha, lambda)?;

    Ok(InitResult {
        epsilon_bar,
        chi,
        epsilon,
        tau,
        sigma,
        beta_tilde: params.beta_tilde,
        zeta_tilde: params.zeta_tilde,
        nu: params.nu,
        psi,
        lambda,
        alpha,
        alpha_bar: report.alpha_bound.value,
        lambda_max: report.lambda_interval.hi,
        delta_hat: report.delta_hat,
        params,
        provenance: InitProvenance {
            t,
            kappa1,
            kappa2,
            scenario,
            epsilon_raised,
            epsilon_floor,
            chi_arbitrary,
        },
    })
}
