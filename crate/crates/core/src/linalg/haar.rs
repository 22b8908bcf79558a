//! Orthonormal 2-D Haar wavelet transform (pyramid layout).
//!
//! After `level` steps the scaling coefficients occupy the top-left
//! `(w >> level) x (h >> level)` block; detail bands surround it.

use super::{DenseVector, GrayImage, LinearOperator};
use crate::error::{Error, Result};
use crate::Scalar;

fn check_dims(width: usize, height: usize, level: u32) -> Result<()> {
    if level == 0 {
        return Err(Error::invalid("haar level must be positive"));
    }
    let block = 1usize << level;
    if !width.is_multiple_of(block) || !height.is_multiple_of(block) {
        return Err(Error::invalid(format!(
            "image {width}x{height} not divisible by 2^{level} = {block}"
        )));
    }
    Ok(())
}

fn forward_1d<T: Scalar>(buf: &mut [T], tmp: &mut [T], s: T) {
    let half = buf.len() / 2;
    for k in 0..half {
        let (a, b) = (buf[2 * k], buf[2 * k + 1]);
        tmp[k] = (a + b) * s;
        tmp[half + k] = (a - b) * s;
    }
    buf.copy_from_slice(&tmp[..buf.len()]);
}

fn inverse_1d<T: Scalar>(buf: &mut [T], tmp: &mut [T], s: T) {
    let half = buf.len() / 2;
    for k in 0..half {
        let (a, d) = (buf[k], buf[half + k]);
        tmp[2 * k] = (a + d) * s;
        tmp[2 * k + 1] = (a - d) * s;
    }
    buf.copy_from_slice(&tmp[..buf.len()]);
}

fn transform_block<T: Scalar>(
    px: &mut [T],
    stride: usize,
    cw: usize,
    ch: usize,
    inverse: bool,
) {
    let s = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let mut line = vec![T::zero(); cw.max(ch)];
    let mut tmp = vec![T::zero(); cw.max(ch)];
    let rows = |px: &mut [T], line: &mut [T], tmp: &mut [T]| {
        for r in 0..ch {
            let row = &mut px[r * stride..r * stride + cw];
            line[..cw].copy_from_slice(row);
            if inverse {
                inverse_1d(&mut line[..cw], tmp, s);
            } else {
                forward_1d(&mut line[..cw], tmp, s);
            }
            row.copy_from_slice(&line[..cw]);
        }
    };
    let cols = |px: &mut [T], line: &mut [T], tmp: &mut [T]| {
        for c in 0..cw {
            for r in 0..ch {
                line[r] = px[r * stride + c];
            }
            if inverse {
                inverse_1d(&mut line[..ch], tmp, s);
            } else {
                forward_1d(&mut line[..ch], tmp, s);
            }
            for r in 0..ch {
                px[r * stride + c] = line[r];
            }
        }
    };
    if inverse {
        cols(px, &mut line, &mut tmp);
        rows(px, &mut line, &mut tmp);
    } else {
        rows(px, &mut line, &mut tmp);
        cols(px, &mut line, &mut tmp);
    }
}

pub fn haar_transform<T: Scalar>(img: &GrayImage<T>, level: u32) -> Result<GrayImage<T>> {
    let (w, h) = (img.width(), img.height());
    check_dims(w, h, level)?;
    let mut out = img.clone();
    for l in 0..level {
        transform_block(out.pixels_mut(), w, w >> l, h >> l, false);
    }
    Ok(out)
}

pub fn haar_inverse<T: Scalar>(img: &GrayImage<T>, level: u32) -> Result<GrayImage<T>> {
    let (w, h) = (img.width(), img.height());
    check_dims(w, h, level)?;
    let mut out = img.clone();
    for l in (0..level).rev() {
        transform_block(out.pixels_mut(), w, w >> l, h >> l, true);
    }
    Ok(out)
}

/// Haar transform `W` as a linear operator on flattened images (`W^* = W^-1`).
#[derive(Debug, Clone, Copy)]
pub struct HaarOperator {
    pub width: usize,
    pub height: usize,
    pub level: u32,
}

impl HaarOperator {
    pub fn new(width: usize, height: usize, level: u32) -> Result<Self> {
        check_dims(width, height, level)?;
        Ok(Self {
            width,
            height,
            level,
        })
    }
}

impl<T: Scalar> LinearOperator<T> for HaarOperator {
    fn domain_dim(&self) -> usize {
        self.width * self.height
    }
    fn codomain_dim(&self) -> usize {
        self.width * self.height
    }
    fn apply(&self, x: &DenseVector<T>) -> DenseVector<T> {
        let img = GrayImage::new(self.width, self.height, x.as_slice().to_vec())
            .expect("haar domain mismatch");
        haar_transform(&img, self.level)
            .expect("dimensions checked at construction")
            .into_vector()
    }
    fn adjoint_apply(&self, y: &DenseVector<T>) -> DenseVector<T> {
        let img = GrayImage::new(self.width, self.height, y.as_slice().to_vec())
            .expect("haar codomain mismatch");
        haar_inverse(&img, self.level)
            .expect("dimensions checked at construction")
            .into_vector()
    }
    fn norm_bound(&self) -> Option<T> {
        Some(T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_collapses_to_one_coefficient() {
        let c: f64 = 0.3;
        let img = GrayImage::filled(8, 8, c);
        let w = haar_transform(&img, 3).unwrap();
        assert!((w.get(0, 0) - 8.0 * c).abs() < 1e-14);
        for (i, &v) in w.pixels().iter().enumerate().skip(1) {
            assert!(v.abs() < 1e-14, "detail coefficient {i} = {v}");
        }
    }

    #[test]
    fn rejects_bad_dimensions() {
        let img = GrayImage::filled(12, 8, 1.0f64);
        assert!(haar_transform(&img, 3).is_err());
        assert!(haar_transform(&img, 2).is_ok());
        assert!(haar_inverse(&img, 3).is_err());
        assert!(HaarOperator::new(8, 8, 0).is_err());
    }

    #[test]
    fn single_level_2x2() {
        let img = GrayImage::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let w = haar_transform(&img, 1).unwrap();
        // rows: [3, -1]/sqrt2, [7, -1]/sqrt2 ; cols: (10, -4)/2, (-2, 0)/2
        for (got, want) in w.pixels().iter().zip([5.0f64, -1.0, -2.0, 0.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }
}
