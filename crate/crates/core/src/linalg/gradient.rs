//! Forward-difference gradient with Neumann boundary and its negative adjoint.

use super::{DenseVector, GrayImage, LinearOperator};
use crate::error::Result;
use crate::Scalar;

/// Horizontal and vertical difference fields.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair<T> {
    pub horizontal: GrayImage<T>,
    pub vertical: GrayImage<T>,
}

impl<T: Scalar> GradientPair<T> {
    pub fn dot(&self, other: &Self) -> T {
        self.horizontal.dot(&other.horizontal) + self.vertical.dot(&other.vertical)
    }

    /// Flattens as `[horizontal; vertical]`.
    pub fn to_vector(&self) -> DenseVector<T> {
        let mut v = self.horizontal.pixels().to_vec();
        v.extend_from_slice(self.vertical.pixels());
        DenseVector::from_vec(v)
    }

    pub fn from_vector(width: usize, height: usize, v: &DenseVector<T>) -> Result<Self> {
        v.check_len(2 * width * height)?;
        let (h, vv) = v.as_slice().split_at(width * height);
        Ok(Self {
            horizontal: GrayImage::new(width, height, h.to_vec())?,
            vertical: GrayImage::new(width, height, vv.to_vec())?,
        })
    }
}

pub fn discrete_gradient<T: Scalar>(img: &GrayImage<T>) -> GradientPair<T> {
    let (w, h) = (img.width(), img.height());
    let horizontal = GrayImage::from_fn(w, h, |r, c| {
        if c + 1 < w {
            img.get(r, c + 1) - img.get(r, c)
        } else {
            T::zero()
        }
    });
    let vertical = GrayImage::from_fn(w, h, |r, c| {
        if r + 1 < h {
            img.get(r + 1, c) - img.get(r, c)
        } else {
            T::zero()
        }
    });
    GradientPair {
        horizontal,
        vertical,
    }
}

/// `div = -grad^*`, so `<grad x, p> = -<x, div p>`.
pub fn discrete_divergence<T: Scalar>(p: &GradientPair<T>) -> Result<GrayImage<T>> {
    p.horizontal.check_same_shape(&p.vertical)?;
    let (w, h) = (p.horizontal.width(), p.horizontal.height());
    Ok(GrayImage::from_fn(w, h, |r, c| {
        let px = &p.horizontal;
        let py = &p.vertical;
        let dx = if w == 1 {
            T::zero()
        } else if c == 0 {
            px.get(r, 0)
        } else if c == w - 1 {
            -px.get(r, c - 1)
        } else {
            px.get(r, c) - px.get(r, c - 1)
        };
        let dy = if h == 1 {
            T::zero()
        } else if r == 0 {
            py.get(0, c)
        } else if r == h - 1 {
            -py.get(r - 1, c)
        } else {
            py.get(r, c) - py.get(r - 1, c)
        };
        dx + dy
    }))
}

/// The gradient as a linear map `R^(w*h) -> R^(2*w*h)`.
#[derive(Debug, Clone, Copy)]
pub struct GradientOperator {
    pub width: usize,
    pub height: usize,
}

impl<T: Scalar> LinearOperator<T> for GradientOperator {
    fn domain_dim(&self) -> usize {
        self.width * self.height
    }

    fn codomain_dim(&self) -> usize {
        2 * self.width * self.height
    }

    fn apply(&self, x: &DenseVector<T>) -> DenseVector<T> {
        let img = GrayImage::new(self.width, self.height, x.as_slice().to_vec())
            .expect("gradient domain mismatch");
        discrete_gradient(&img).to_vector()
    }

    fn adjoint_apply(&self, y: &DenseVector<T>) -> DenseVector<T> {
        let p = GradientPair::from_vector(self.width, self.height, y)
            .expect("gradient codomain mismatch");
        let div = discrete_divergence(&p).expect("matching fields");
        let mut v = div.into_vector();
        v.scale_mut(-T::one());
        v
    }

    fn norm_bound(&self) -> Option<T> {
        Some(T::lit(8.0).sqrt())
    }
}
