use rayon::prelude::*;

use crate::dataterm::LinearizedData;
use crate::error::{Error, Result};
use crate::grid::{FlowField, Image, PixelMask};
use crate::scalar::Scalar;

use super::filter::sample_bilinear;

/// Samples `I2` at `x + w(x)`. Pixels whose target leaves the grid are
/// invalid and hold zero.
pub fn warp_image<T: Scalar>(image: &Image<T>, flow: &FlowField<T>) -> Result<(Image<T>, PixelMask)> {
    if image.shape() != flow.shape() {
        return Err(Error::ShapeMismatch {
            expected: image.shape(),
            found: flow.shape(),
        });
    }
    let (w, h) = image.shape();
    let samples: Vec<Option<T>> = (0..w * h)
        .into_par_iter()
        .map(|i| {
            let [u, v] = flow.at(i);
            sample_bilinear(image, T::of_usize(i % w) + u, T::of_usize(i / w) + v)
        })
        .collect();
    let valid = PixelMask::new(w, h, samples.iter().map(Option::is_some).collect())?;
    let warped = Image::from_raw(w, h, samples.into_iter().map(|s| s.unwrap_or_else(T::zero)).collect());
    Ok((warped, valid))
}

/// Derivative along one axis from the valid neighbours: central where both
/// exist, one-sided otherwise, zero for isolated pixels.
#[inline]
fn derivative<T: Scalar>(prev: Option<T>, here: T, next: Option<T>) -> T {
    match (prev, next) {
        (Some(a), Some(b)) => (b - a) / T::of(2.0),
        (None, Some(b)) => b - here,
        (Some(a), None) => here - a,
        (None, None) => T::zero(),
    }
}

/// `I_t = Ĩ₂ − I₁` and `∇Ĩ₂` of the warped second frame, zeroed where the
/// warp is invalid.
pub fn linearize<T: Scalar>(first: &Image<T>, warped: &Image<T>, valid: &PixelMask) -> Result<LinearizedData<T>> {
    if first.shape() != warped.shape() || valid.shape() != warped.shape() {
        return Err(Error::ShapeMismatch {
            expected: first.shape(),
            found: warped.shape(),
        });
    }
    let (w, h) = warped.shape();
    let at = |x: isize, y: isize| -> Option<T> {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            return None;
        }
        let (x, y) = (x as usize, y as usize);
        valid.get(x, y).then(|| warped.get(x, y))
    };
    let n = w * h;
    let (mut gx, mut gy, mut it) = (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]);
    for y in 0..h {
        for x in 0..w {
            if !valid.get(x, y) {
                continue;
            }
            let i = y * w + x;
            let (xi, yi) = (x as isize, y as isize);
            let here = warped.get(x, y);
            gx[i] = derivative(at(xi - 1, yi), here, at(xi + 1, yi));
            gy[i] = derivative(at(xi, yi - 1), here, at(xi, yi + 1));
            it[i] = here - first.get(x, y);
        }
    }
    LinearizedData::new(w, h, gx, gy, it)
}

impl<T: Scalar> LinearizedData<T> {
    /// Re-expresses data linearized about `w0` in terms of the full flow:
    /// `∇I·(w − w0) + I_t = ∇I·w + (I_t − ∇I·w0)`.
    pub fn about(&self, w0: &FlowField<T>) -> Result<Self> {
        if self.shape() != w0.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: w0.shape(),
            });
        }
        let temporal = (0..w0.len())
            .map(|i| {
                let [gx, gy] = self.gradient(i);
                let [u, v] = w0.at(i);
                self.temporal(i) - gx * u - gy * v
            })
            .collect();
        LinearizedData::new(
            self.width(),
            self.height(),
            self.grad_x().to_vec(),
            self.grad_y().to_vec(),
            temporal,
        )
    }
}
