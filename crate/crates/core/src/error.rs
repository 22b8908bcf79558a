use thiserror::Error;

/// Named inequalities checked by the parameter certificates.
///
/// The names are stable: the CLI prints them and tests match on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Inequality {
    /// `1 - zeta^2 - eps > 0`, needed for `psi > 1`.
    EpsilonBelowOneMinusZetaSq,
    /// `tau <= 2 * beta_tilde * eps`.
    StepBelowCocoercivity,
    /// `1 - sigma * tau * ||L||^2 > 0`.
    DualStepProduct,
    /// `zeta_tilde < 1`.
    ZetaTildeBelowOne,
    /// `lambda < phi(alpha) * psi`, the admissible relaxation interval.
    LambdaInterval,
    /// `alpha < alpha_bar(psi, lambda)`.
    AlphaInterval,
    /// `rho_n >= 0`.
    RhoNonnegative,
    /// `liminf delta_n > 0`.
    DeltaPositive,
    /// Decreasing schedules must be decreasing with summable excess.
    DecreasingSummable,
    /// `gamma < 2 * beta` for forward-backward.
    ForwardBackwardStep,
    /// `tau < chi` (FBHF / FPDHF step bound).
    StepBelowChi,
    /// A parameter outside its open domain (e.g. `t`, `kappa`).
    ParameterDomain,
}

impl Inequality {
    pub fn name(self) -> &'static str {
        match self {
            Inequality::EpsilonBelowOneMinusZetaSq => "1 - zeta_tilde^2 - eps > 0",
            Inequality::StepBelowCocoercivity => "tau <= 2 beta_tilde eps",
            Inequality::DualStepProduct => "1 - sigma tau ||L||^2 > 0",
            Inequality::ZetaTildeBelowOne => "zeta_tilde < 1",
            Inequality::LambdaInterval => "lambda in ]0, phi(alpha) psi[",
            Inequality::AlphaInterval => "alpha in [0, alpha_bar(psi, lambda)[",
            Inequality::RhoNonnegative => "rho_n >= 0",
            Inequality::DeltaPositive => "liminf delta_n > 0",
            Inequality::DecreasingSummable => "alpha_n decreasing, sum(alpha_n - alpha) < inf",
            Inequality::ForwardBackwardStep => "gamma < 2 beta",
            Inequality::StepBelowChi => "tau in ]0, chi[",
            Inequality::ParameterDomain => "parameter in its open domain",
        }
    }
}

impl std::fmt::Display for Inequality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("infeasible parameters: {inequality} violated ({detail})")]
    Infeasible {
        inequality: Inequality,
        detail: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator not supported by {method}: {reason}")]
    Structure {
        method: &'static str,
        reason: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn infeasible(inequality: Inequality, detail: impl Into<String>) -> Self {
        Error::Infeasible {
            inequality,
            detail: detail.into(),
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// The violated inequality, if this is a feasibility error.
    pub fn inequality(&self) -> Option<Inequality> {
        match self {
            Error::Infeasible { inequality, .. } => Some(*inequality),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
