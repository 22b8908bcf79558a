//! 2-D correlation with symmetric (half-sample reflective) boundary.

use serde::{Deserialize, Serialize};

use super::{DenseMatrix, DenseVector, GrayImage, LinearOperator};
use crate::error::{Error, Result};
use crate::Scalar;

/// Named blur kernels used by the restoration experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlurKernel {
    /// 3x3 box average.
    Avg3,
    /// 9x9 box average.
    Avg9,
    /// 3x3 sampled Gaussian, sigma 0.5, normalized to sum 1.
    Gauss3,
}

/// Standard deviation of [`BlurKernel::Gauss3`].
pub const GAUSS3_SIGMA: f64 = 0.5;

impl BlurKernel {
    pub fn matrix<T: Scalar>(self) -> DenseMatrix<T> {
        match self {
            BlurKernel::Avg3 => box_kernel(3),
            BlurKernel::Avg9 => box_kernel(9),
            BlurKernel::Gauss3 => gaussian_kernel(3, GAUSS3_SIGMA),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BlurKernel::Avg3 => "avg3",
            BlurKernel::Avg9 => "avg9",
            BlurKernel::Gauss3 => "gauss3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "avg3" => Ok(BlurKernel::Avg3),
            "avg9" => Ok(BlurKernel::Avg9),
            "gauss3" => Ok(BlurKernel::Gauss3),
            other => Err(Error::Parse(format!("unknown kernel '{other}'"))),
        }
    }
}

pub fn box_kernel<T: Scalar>(size: usize) -> DenseMatrix<T> {
    let v = T::one() / T::of_usize(size * size);
    DenseMatrix::from_fn(size, size, |_, _| v)
}

pub fn gaussian_kernel<T: Scalar>(size: usize, sigma: f64) -> DenseMatrix<T> {
    let half = (size / 2) as f64;
    let raw: Vec<f64> = (0..size * size)
        .map(|k| {
            let (i, j) = ((k / size) as f64 - half, (k % size) as f64 - half);
            (-(i * i + j * j) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    DenseMatrix::from_fn(size, size, |i, j| T::lit(raw[i * size + j] / total))
}

/// Reflects `i` into `0..n` with edge duplication (`-1 -> 0`, `n -> n-1`).
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let mut k = i.rem_euclid(period);
    if k >= n {
        k = period - 1 - k;
    }
    k as usize
}

fn check_kernel<T: Scalar>(kernel: &DenseMatrix<T>) -> Result<()> {
    if kernel.rows().is_multiple_of(2) || kernel.cols().is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "kernel must be odd-sized, got {}x{}",
            kernel.rows(),
            kernel.cols()
        )));
    }
    Ok(())
}

pub fn blur_apply<T: Scalar>(img: &GrayImage<T>, kernel: &DenseMatrix<T>) -> Result<GrayImage<T>> {
    check_kernel(kernel)?;
    let (w, h) = (img.width(), img.height());
    let (kr, kc) = ((kernel.rows() / 2) as isize, (kernel.cols() / 2) as isize);
    Ok(GrayImage::from_fn(w, h, |r, c| {
        let mut acc = T::zero();
        for a in 0..kernel.rows() {
            let rr = reflect(r as isize + a as isize - kr, h);
            for b in 0..kernel.cols() {
                let cc = reflect(c as isize + b as isize - kc, w);
                acc += kernel.get(a, b) * img.get(rr, cc);
            }
        }
        acc
    }))
}

/// Adjoint of [`blur_apply`]; equal to it for symmetric kernels.
pub fn blur_adjoint<T: Scalar>(img: &GrayImage<T>, kernel: &DenseMatrix<T>) -> Result<GrayImage<T>> {
    check_kernel(kernel)?;
    let (w, h) = (img.width(), img.height());
    let (kr, kc) = ((kernel.rows() / 2) as isize, (kernel.cols() / 2) as isize);
    let mut out = GrayImage::filled(w, h, T::zero());
    for r in 0..h {
        for c in 0..w {
            let y = img.get(r, c);
            for a in 0..kernel.rows() {
                let rr = reflect(r as isize + a as isize - kr, h);
                for b in 0..kernel.cols() {
                    let cc = reflect(c as isize + b as isize - kc, w);
                    let v = out.get(rr, cc) + kernel.get(a, b) * y;
                    out.set(rr, cc, v);
                }
            }
        }
    }
    Ok(out)
}

/// Blur as a linear operator on flattened `width x height` images.
#[derive(Debug, Clone)]
pub struct BlurOperator<T> {
    pub width: usize,
    pub height: usize,
    kernel: DenseMatrix<T>,
    symmetric: bool,
}

impl<T: Scalar> BlurOperator<T> {
    pub fn new(width: usize, height: usize, kernel: DenseMatrix<T>) -> Result<Self> {
        check_kernel(&kernel)?;
        let symmetric = (0..kernel.rows()).all(|a| {
            (0..kernel.cols()).all(|b| {
                kernel.get(a, b) == kernel.get(kernel.rows() - 1 - a, kernel.cols() - 1 - b)
            })
        });
        Ok(Self {
            width,
            height,
            kernel,
            symmetric,
        })
    }

    pub fn kernel(&self) -> &DenseMatrix<T> {
        &self.kernel
    }

    fn as_image(&self, x: &DenseVector<T>) -> GrayImage<T> {
        GrayImage::new(self.width, self.height, x.as_slice().to_vec()).expect("blur domain mismatch")
    }
}

impl<T: Scalar> LinearOperator<T> for BlurOperator<T> {
    fn domain_dim(&self) -> usize {
        self.width * self.height
    }
    fn codomain_dim(&self) -> usize {
        self.width * self.height
    }
    fn apply(&self, x: &DenseVector<T>) -> DenseVector<T> {
        blur_apply(&self.as_image(x), &self.kernel)
            .expect("kernel checked")
            .into_vector()
    }
    fn adjoint_apply(&self, y: &DenseVector<T>) -> DenseVector<T> {
        // point-symmetric kernels make correlation self-adjoint
        if self.symmetric {
            return self.apply(y);
        }
        blur_adjoint(&self.as_image(y), &self.kernel)
            .expect("kernel checked")
            .into_vector()
    }
    fn norm_bound(&self) -> Option<T> {
        Some(
            self.kernel
                .as_slice()
                .iter()
                .fold(T::zero(), |acc, v| acc + v.abs()),
        )
    }
}
