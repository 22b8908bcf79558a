//! Parameter admissibility: closed-form bounds, validated step constants and
//! the runtime Lyapunov monitor.

mod fejer;
mod formulas;
mod params;

pub use fejer::{FejerInput, FejerMonitor, FejerReport, FEJER_SLACK};
pub use formulas::{
    alpha_bound, alpha_quadratic, delta_constant, delta_n, lambda_interval, phi_value, psi_value,
    rho_value, AlphaBound, NuMode, OpenInterval,
};
pub use params::{fpdhf_constants, Certificate, CertificateReport, StepParams};
