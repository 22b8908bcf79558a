//! Dense containers, structured image operators and operator-norm estimation.

mod blur;
mod gradient;
mod haar;
mod image;
mod matrix;
mod norm;
mod operator;
pub mod pgm;
mod vector;

pub use blur::{
    blur_adjoint, blur_apply, box_kernel, gaussian_kernel, BlurKernel, BlurOperator, GAUSS3_SIGMA,
};
pub use gradient::{discrete_divergence, discrete_gradient, GradientOperator, GradientPair};
pub use haar::{haar_inverse, haar_transform, HaarOperator};
pub use image::GrayImage;
pub use matrix::DenseMatrix;
pub use norm::{op_norm_estimate, op_norm_report, NormEstimate, POWER_METHOD_RTOL};
pub use operator::{DiagonalOperator, IdentityOperator, LinearOperator, ZeroOperator};
pub use vector::DenseVector;
