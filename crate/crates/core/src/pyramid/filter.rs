//! Separable Gaussian smoothing and bilinear resampling.

use crate::grid::{FlowField, Image};
use crate::scalar::Scalar;

fn gaussian_kernel<T: Scalar>(sigma: T) -> Vec<T> {
    let radius = (T::of(3.0) * sigma).ceil().to_usize().unwrap_or(0).max(1);
    let two_s2 = T::of(2.0) * sigma * sigma;
    let mut k: Vec<T> = (0..=2 * radius)
        .map(|i| {
            let d = T::of_usize(i) - T::of_usize(radius);
            (-(d * d) / two_s2).exp()
        })
        .collect();
    let sum: T = k.iter().copied().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Gaussian blur with standard deviation `sigma`, replicating border
/// samples. `sigma <= 0` returns a copy.
pub fn gaussian_blur<T: Scalar>(image: &Image<T>, sigma: T) -> Image<T> {
    if !(sigma > T::zero()) {
        return image.clone();
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;
    let (w, h) = image.shape();
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;

    let mut tmp = vec![T::zero(); w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = T::zero();
            for (j, &kv) in kernel.iter().enumerate() {
                let sx = clamp(x as isize + j as isize - radius, w);
                acc += kv * image.get(sx, y);
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![T::zero(); w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = T::zero();
            for (j, &kv) in kernel.iter().enumerate() {
                let sy = clamp(y as isize + j as isize - radius, h);
                acc += kv * tmp[sy * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    Image::from_raw(w, h, out)
}

/// Bilinear interpolation at `(x, y)`; `None` outside `[0, w−1] × [0, h−1]`.
#[inline]
pub fn sample_bilinear<T: Scalar>(image: &Image<T>, x: T, y: T) -> Option<T> {
    let (w, h) = image.shape();
    let (wmax, hmax) = (T::of_usize(w - 1), T::of_usize(h - 1));
    if !(x >= T::zero() && y >= T::zero() && x <= wmax && y <= hmax) {
        return None;
    }
    Some(sample_clamped(image, x, y))
}

/// Bilinear interpolation with coordinates clamped into the grid.
#[inline]
pub fn sample_clamped<T: Scalar>(image: &Image<T>, x: T, y: T) -> T {
    let (w, h) = image.shape();
    let x = x.max(T::zero()).min(T::of_usize(w - 1));
    let y = y.max(T::zero()).min(T::of_usize(h - 1));
    let x0 = x.floor().to_usize().unwrap_or(0).min(w - 1);
    let y0 = y.floor().to_usize().unwrap_or(0).min(h - 1);
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = x - T::of_usize(x0);
    let fy = y - T::of_usize(y0);
    let top = image.get(x0, y0) * (T::one() - fx) + image.get(x1, y0) * fx;
    let bottom = image.get(x0, y1) * (T::one() - fx) + image.get(x1, y1) * fx;
    top * (T::one() - fy) + bottom * fy
}

/// Source coordinate of destination pixel `i` under pixel-centre alignment.
#[inline]
fn source_coord<T: Scalar>(i: usize, src: usize, dst: usize) -> T {
    let ratio = T::of_usize(src) / T::of_usize(dst);
    (T::of_usize(i) + T::of(0.5)) * ratio - T::of(0.5)
}

/// Bilinear resampling to `width × height` with pixel centres aligned.
pub fn resize_bilinear<T: Scalar>(image: &Image<T>, width: usize, height: usize) -> Image<T> {
    let (w, h) = image.shape();
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        let sy = source_coord::<T>(y, h, height);
        for x in 0..width {
            let sx = source_coord::<T>(x, w, width);
            out.push(sample_clamped(image, sx, sy));
        }
    }
    Image::from_raw(width, height, out)
}

/// Resamples a flow field to `width × height` and rescales the
/// displacements by the per-axis size ratio.
pub fn resize_flow<T: Scalar>(flow: &FlowField<T>, width: usize, height: usize) -> FlowField<T> {
    let (w, h) = flow.shape();
    let su = T::of_usize(width) / T::of_usize(w);
    let sv = T::of_usize(height) / T::of_usize(h);
    let plane = |data: &[T], s: T| {
        let img = Image::from_raw(w, h, data.to_vec());
        resize_bilinear(&img, width, height)
            .data()
            .iter()
            .map(|&x| x * s)
            .collect::<Vec<_>>()
    };
    FlowField::from_raw(width, height, plane(flow.u(), su), plane(flow.v(), sv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_is_normalized_and_symmetric() {
        let k = gaussian_kernel(0.9f64.sqrt());
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        for i in 0..k.len() / 2 {
            assert_eq!(k[i], k[k.len() - 1 - i]);
        }
    }

    #[test]
    fn blur_keeps_ramp_inside() {
        let img = Image::from_fn(20, 10, |x, y| 2.0 * x as f64 - 0.5 * y as f64).unwrap();
        let b = gaussian_blur(&img, 1.0);
        for y in 3..7 {
            for x in 3..17 {
                assert!((b.get(x, y) - img.get(x, y)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bilinear_exact_on_affine() {
        let img = Image::from_fn(5, 4, |x, y| 3.0 * x as f64 + y as f64 + 1.0).unwrap();
        let v = sample_bilinear(&img, 1.5, 2.25).unwrap();
        assert!((v - (4.5 + 2.25 + 1.0)).abs() < 1e-12);
        assert!(sample_bilinear(&img, 4.0, 3.0).is_some());
        assert!(sample_bilinear(&img, 4.01, 0.0).is_none());
        assert!(sample_bilinear(&img, -0.01, 0.0).is_none());
    }

    #[test]
    fn constant_flow_upsamples_scaled() {
        let f = FlowField::constant(75, 60, 0.3f64, -0.6).unwrap();
        let g = resize_flow(&f, 100, 80);
        for i in 0..g.len() {
            let [a, b] = g.at(i);
            assert!((a - 0.4).abs() < 1e-9 && (b + 0.8).abs() < 1e-9);
        }
    }
}
