//! Inertial and relaxed nonlinear forward-backward splitting.
//!
//! The core iteration solves `0 in A z + B z` through a warped resolvent
//! `(M + A)^-1 (M - C)` with a kernel `M`, a metric `S`, inertia `alpha_n`
//! and relaxation `lambda_n`. Concrete methods (FPDHF and its special cases)
//! are supplied as kernels; step sizes are validated by certificates before
//! any iteration runs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod experiments;
pub mod error;
pub mod certificates;
pub mod linalg;
pub mod methods;
pub mod operators;
pub mod schedules;
mod scalar;

pub use error::{Error, Inequality, Result};
pub use scalar::Scalar;

pub type DenseVector64 = linalg::DenseVector<f64>;
pub type DenseVector32 = linalg::DenseVector<f32>;
pub type DenseMatrix64 = linalg::DenseMatrix<f64>;
pub type DenseMatrix32 = linalg::DenseMatrix<f32>;
pub type GrayImage64 = linalg::GrayImage<f64>;
pub type GrayImage32 = linalg::GrayImage<f32>;
pub type SplitProblem64 = operators::SplitProblem<f64>;
pub type SplitProblem32 = operators::SplitProblem<f32>;
