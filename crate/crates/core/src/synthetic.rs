//! Procedural image pairs with exactly known motion, for tests, demos and
//! calibration.
//!
//! The second frame is a smooth random texture `T`; the first frame is
//! rendered as `I₁(x) = T(x + w(x))`, so `w` is the exact flow from frame
//! one to frame two at every pixel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{FlowField, Image};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
struct Wave {
    kx: f64,
    ky: f64,
    phase: f64,
    amplitude: f64,
}

/// Sum of random plane waves around mid-grey, band-limited to wavelengths
/// between `min_wavelength` and `max_wavelength` pixels.
#[derive(Debug, Clone)]
pub struct Texture {
    waves: Vec<Wave>,
    mean: f64,
}

impl Texture {
    pub fn random(seed: u64, count: usize, min_wavelength: f64, max_wavelength: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amplitude = 90.0 / (count as f64).sqrt();
        let waves = (0..count)
            .map(|_| {
                let angle = rng.random_range(0.0..std::f64::consts::PI);
                let wavelength = rng.random_range(min_wavelength..max_wavelength);
                let k = std::f64::consts::TAU / wavelength;
                Wave {
                    kx: k * angle.cos(),
                    ky: k * angle.sin(),
                    phase: rng.random_range(0.0..std::f64::consts::TAU),
                    amplitude: amplitude * rng.random_range(0.5..1.0),
                }
            })
            .collect();
        Self { waves, mean: 128.0 }
    }

    /// Default texture used by the bundled fixtures.
    pub fn with_seed(seed: u64) -> Self {
        Self::random(seed, 24, 5.0, 24.0)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.mean
            + self
                .waves
                .iter()
                .map(|w| w.amplitude * (w.kx * x + w.ky * y + w.phase).sin())
                .sum::<f64>()
    }
}

/// Frames and ground truth rendered from a texture and a flow function.
#[derive(Debug, Clone)]
pub struct SyntheticPair<T> {
    pub first: Image<T>,
    pub second: Image<T>,
    pub flow: FlowField<T>,
}

pub fn render_pair<T: Scalar>(
    width: usize,
    height: usize,
    texture: &Texture,
    flow: impl Fn(usize, usize) -> [f64; 2],
) -> Result<SyntheticPair<T>> {
    let second = Image::from_fn(width, height, |x, y| T::of(texture.eval(x as f64, y as f64)))?;
    let first = Image::from_fn(width, height, |x, y| {
        let [u, v] = flow(x, y);
        T::of(texture.eval(x as f64 + u, y as f64 + v))
    })?;
    let flow = FlowField::from_fn(width, height, |x, y| {
        let [u, v] = flow(x, y);
        [T::of(u), T::of(v)]
    })?;
    Ok(SyntheticPair { first, second, flow })
}

/// Global translation by `shift`.
pub fn translation_pair<T: Scalar>(
    width: usize,
    height: usize,
    seed: u64,
    shift: [f64; 2],
) -> Result<SyntheticPair<T>> {
    render_pair(width, height, &Texture::with_seed(seed), |_, _| shift)
}

/// Column at which [`two_region_flow`] switches regions.
pub fn two_region_boundary(width: usize) -> usize {
    width / 2
}

/// Left half translates by `(1.5, 0.5)`; the right half follows a small
/// affine motion around `(−0.5, 0.25)` anchored at its centre.
pub fn two_region_flow(width: usize, height: usize) -> impl Fn(usize, usize) -> [f64; 2] {
    let boundary = two_region_boundary(width);
    let cx = (boundary + width) as f64 / 2.0;
    let cy = height as f64 / 2.0;
    move |x, y| {
        if x < boundary {
            [1.5, 0.5]
        } else {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            [-0.5 + 0.02 * dx - 0.01 * dy, 0.25 + 0.01 * dx + 0.02 * dy]
        }
    }
}

pub fn two_region_pair<T: Scalar>(width: usize, height: usize, seed: u64) -> Result<SyntheticPair<T>> {
    render_pair(width, height, &Texture::with_seed(seed), two_region_flow(width, height))
}

/// Smoothly varying affine motion over the whole frame (no discontinuity).
pub fn affine_pair<T: Scalar>(width: usize, height: usize, seed: u64) -> Result<SyntheticPair<T>> {
    let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
    render_pair(width, height, &Texture::with_seed(seed), move |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        [0.4 + 0.03 * dx - 0.01 * dy, -0.3 + 0.01 * dx + 0.025 * dy]
    })
}
