//! Closed-form admissibility functions.

use serde::Serialize;

use crate::error::{Error, Inequality, Result};
use crate::Scalar;

/// Whether `-(gamma M - S)` is monotone (`nu = 0`) or not known to be (`nu = 2 zeta`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NuMode {
    Monotone,
    General,
}

impl NuMode {
    pub fn nu<T: Scalar>(self, zeta: T) -> T {
        match self {
            NuMode::Monotone => T::zero(),
            NuMode::General => zeta + zeta,
        }
    }
}

/// `psi = (2 - eps + nu) / (1 + zeta^2 + nu)`, in `]1, 2[` whenever `1 - zeta^2 - eps > 0`.
pub fn psi_value<T: Scalar>(zeta: T, epsilon: T, mode: NuMode) -> Result<T> {
    if !(epsilon > T::zero() && epsilon < T::one()) || !(zeta >= T::zero()) {
        return Err(Error::infeasible(
            Inequality::ParameterDomain,
            format!("eps = {epsilon} must lie in ]0,1[ and zeta = {zeta} must be nonnegative"),
        ));
    }
    let margin = T::one() - zeta * zeta - epsilon;
    if !(margin > T::zero()) {
        return Err(Error::infeasible(
            Inequality::EpsilonBelowOneMinusZetaSq,
            format!("1 - zeta^2 - eps = {margin} with zeta = {zeta}, eps = {epsilon}"),
        ));
    }
    let nu = mode.nu(zeta);
    let two = T::lit(2.0);
    Ok((two - epsilon + nu) / (T::one() + zeta * zeta + nu))
}

/// `phi(alpha) = (1 - alpha)^2 / (2 alpha^2 - alpha + 1)`, decreasing from 1 to 0 on `[0, 1[`.
pub fn phi_value<T: Scalar>(alpha: T) -> Result<T> {
    if !(alpha >= T::zero() && alpha < T::one()) {
        return Err(Error::infeasible(
            Inequality::ParameterDomain,
            format!("alpha = {alpha} outside [0, 1["),
        ));
    }
    let one_minus = T::one() - alpha;
    Ok(one_minus * one_minus / (T::lit(2.0) * alpha * alpha - alpha + T::one()))
}

/// Open interval `]lo, hi[`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpenInterval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> OpenInterval<T> {
    pub fn contains(&self, v: T) -> bool {
        v > self.lo && v < self.hi
    }
    pub fn midpoint(&self) -> T {
        T::lit(0.5) * (self.lo + self.hi)
    }
}

/// Admissible relaxation range `]0, phi(alpha) psi[`.
pub fn lambda_interval<T: Scalar>(psi: T, alpha: T) -> Result<OpenInterval<T>> {
    Ok(OpenInterval { lo: T::zero(), hi: phi_value(alpha)? * psi })
}

/// Upper end of the inertia range for a given relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaBound<T> {
    pub value: T,
    /// False when `lambda >= psi`: the inertia range is empty.
    pub feasible: bool,
}

/// `alpha_bar = 2(r - 1) / ((2r - 1) + sqrt(8r - 7))` with `r = psi / lambda`.
///
/// This is the smaller root of `a x^2 - (2a + 3) x + a + 1` with `a = r - 2`,
/// written in a form that stays finite at `a = 0`.
pub fn alpha_bound<T: Scalar>(psi: T, lambda: T) -> AlphaBound<T> {
    if !(lambda > T::zero() && lambda < psi) {
        return AlphaBound { value: T::zero(), feasible: false };
    }
    let r = psi / lambda;
    let one = T::one();
    let two = T::lit(2.0);
    let value = two * (r - one) / ((two * r - one) + (T::lit(8.0) * r - T::lit(7.0)).sqrt());
    AlphaBound { value, feasible: true }
}

/// `a alpha^2 - (2a + 3) alpha + a + 1` with `a = psi/lambda - 2`; positive exactly on `[0, alpha_bar[`.
pub fn alpha_quadratic<T: Scalar>(psi: T, lambda: T, alpha: T) -> T {
    let a = psi / lambda - T::lit(2.0);
    a * alpha * alpha - (a + a + T::lit(3.0)) * alpha + a + T::one()
}

/// `delta_n = (1 - a_n) rho_n - a_{n+1}(1 - a_{n+1}) rho_{n+1} - a_{n+1}(1 + a_{n+1})`.
pub fn delta_n<T: Scalar>(alpha_n: T, alpha_np1: T, rho_n: T, rho_np1: T) -> T {
    let one = T::one();
    (one - alpha_n) * rho_n - alpha_np1 * (one - alpha_np1) * rho_np1 - alpha_np1 * (one + alpha_np1)
}

/// Limit of `delta_n` for constant `alpha`, `lambda`: `(1 - alpha)^2 rho - alpha (1 + alpha)`.
pub fn delta_constant<T: Scalar>(alpha: T, rho: T) -> T {
    let one = T::one();
    (one - alpha) * (one - alpha) * rho - alpha * (one + alpha)
}

/// `rho = psi / lambda - 1`.
pub fn rho_value<T: Scalar>(psi: T, lambda: T) -> T {
    psi / lambda - T::one()
}
