//! Named splitting methods as engine kernels, plus step-size initialization.

mod init;
mod primal;
mod primal_dual;
mod product;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use init::{
    chi_value, epsilon_bar, initialize_fpdhf, InitInput, InitProvenance, InitResult, Scenario,
    EPSILON_FLOOR,
};
pub use primal::{kernel_fb, kernel_fbf, kernel_fbhf, FbKernel, FbhfKernel};
pub use primal_dual::{
    kernel_chambolle_pock, kernel_condat_vu, kernel_cp_fbf, kernel_fpdhf, PrimalDualKernel,
    PrimalDualPoint,
};
pub use product::{
    kernel_nfb_product, product_m, product_s, product_s_form, product_t, ProductKernel,
};

use crate::engine::MethodKernel;
use crate::error::{Error, Result};
use crate::operators::SplitProblem;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MethodName {
    #[serde(rename = "fb")]
    Fb,
    #[serde(rename = "fbf")]
    Fbf,
    #[serde(rename = "fbhf")]
    Fbhf,
    #[serde(rename = "cp")]
    Cp,
    #[serde(rename = "cv")]
    Cv,
    #[serde(rename = "cp-fbf")]
    CpFbf,
    #[serde(rename = "fpdhf")]
    Fpdhf,
    #[serde(rename = "fpdhf-oracle")]
    FpdhfOracle,
}

impl MethodName {
    pub const ALL: [MethodName; 8] = [
        MethodName::Fb,
        MethodName::Fbf,
        MethodName::Fbhf,
        MethodName::Cp,
        MethodName::Cv,
        MethodName::CpFbf,
        MethodName::Fpdhf,
        MethodName::FpdhfOracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodName::Fb => "fb",
            MethodName::Fbf => "fbf",
            MethodName::Fbhf => "fbhf",
            MethodName::Cp => "cp",
            MethodName::Cv => "cv",
            MethodName::CpFbf => "cp-fbf",
            MethodName::Fpdhf => "fpdhf",
            MethodName::FpdhfOracle => "fpdhf-oracle",
        }
    }

    pub fn is_primal_dual(self) -> bool {
        !matches!(self, MethodName::Fb | MethodName::Fbf | MethodName::Fbhf)
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MethodName::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown method '{s}'")))
    }
}

/// Builds the kernel for `method`; `sigma` is ignored by primal methods and
/// `tau` is the step `gamma` for forward-backward.
pub fn build_kernel<T: Scalar>(
    method: MethodName,
    problem: &SplitProblem<T>,
    tau: T,
    sigma: T,
) -> Result<Box<dyn MethodKernel<T>>> {
    Ok(match method {
        MethodName::Fb => Box::new(kernel_fb(problem, tau)?),
        MethodName::Fbf => Box::new(kernel_fbf(problem, tau)?),
        MethodName::Fbhf => Box::new(kernel_fbhf(problem, tau)?),
        MethodName::Cp => Box::new(kernel_chambolle_pock(problem, tau, sigma)?),
        MethodName::Cv => Box::new(kernel_condat_vu(problem, tau, sigma)?),
        MethodName::CpFbf => Box::new(kernel_cp_fbf(problem, tau, sigma)?),
        MethodName::Fpdhf => Box::new(kernel_fpdhf(problem, tau, sigma)?),
        MethodName::FpdhfOracle => Box::new(kernel_nfb_product(problem, tau, sigma)?),
    })
}
