//! Coarse-to-fine estimation: Gaussian pyramid, warping, re-linearization
//! and weighted-median cleanup at every scale.

mod filter;
mod median;
mod warp;

pub use filter::{gaussian_blur, resize_bilinear, resize_flow, sample_bilinear, sample_clamped};
pub use median::{weighted_median, weighted_median_filter};
pub use warp::{linearize, warp_image};

use log::{debug, info};

use crate::dataterm::SparseMatches;
use crate::error::{invalid_param, Error, Result};
use crate::grid::{FlowField, Image};
use crate::scalar::Scalar;
use crate::solver::{admm_solve, SolverConfig};

/// Pyramid and warping parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PyramidConfig<T> {
    /// Size ratio between consecutive levels.
    pub scale: T,
    /// Levels whose smaller side would drop below this are not built.
    pub min_size: usize,
    /// Re-linearizations per level.
    pub warps: usize,
    /// Variance of the Gaussian applied to both input frames.
    pub prefilter_variance: T,
    /// Side of the weighted-median window; 1 disables the filter.
    pub median_window: usize,
    /// Intensity scale of the median weights (0–255 images).
    pub median_sigma: T,
    /// Also filter after the last warp of the finest level. Off by default:
    /// the median does not preserve affine ramps, so the returned field is
    /// the raw ADMM estimate.
    pub median_on_output: bool,
}

impl<T: Scalar> Default for PyramidConfig<T> {
    fn default() -> Self {
        Self {
            scale: T::of(0.75),
            min_size: 16,
            warps: 5,
            prefilter_variance: T::of(0.9),
            median_window: 5,
            median_sigma: T::of(10.0),
            median_on_output: false,
        }
    }
}

impl<T: Scalar> PyramidConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > T::zero() && self.scale < T::one()) {
            return Err(invalid_param("scale", "must lie in (0, 1)"));
        }
        if self.min_size < 8 {
            return Err(invalid_param("min_size", "must be at least 8"));
        }
        if self.warps == 0 {
            return Err(invalid_param("warps", "must be at least 1"));
        }
        if !(self.prefilter_variance >= T::zero() && self.prefilter_variance.is_finite()) {
            return Err(invalid_param("prefilter_variance", "must be finite and >= 0"));
        }
        if self.median_window.is_multiple_of(2) {
            return Err(invalid_param("median_window", "must be odd"));
        }
        if !(self.median_sigma > T::zero()) {
            return Err(invalid_param("median_sigma", "must be positive"));
        }
        Ok(())
    }

    /// Standard deviation of the anti-aliasing blur before each downsampling.
    fn downsample_sigma(&self) -> T {
        (T::of(2.0) * self.scale).sqrt().recip()
    }
}

/// Prefiltered pyramid, finest level first.
pub fn build_pyramid<T: Scalar>(image: &Image<T>, config: &PyramidConfig<T>) -> Result<Vec<Image<T>>> {
    config.validate()?;
    let (w, h) = image.shape();
    if w < 2 || h < 2 {
        return Err(Error::InvalidDimensions { width: w, height: h });
    }
    let mut levels = vec![gaussian_blur(image, config.prefilter_variance.sqrt())];
    loop {
        let prev = levels.last().expect("level 0 exists");
        let (pw, ph) = prev.shape();
        let nw = (T::of_usize(pw) * config.scale).round().to_usize().unwrap_or(0);
        let nh = (T::of_usize(ph) * config.scale).round().to_usize().unwrap_or(0);
        if nw.min(nh) < config.min_size || (nw, nh) == (pw, ph) {
            break;
        }
        let smoothed = gaussian_blur(prev, config.downsample_sigma());
        levels.push(resize_bilinear(&smoothed, nw, nh));
    }
    Ok(levels)
}

/// Convergence summary of one ADMM run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpReport<T> {
    pub iterations: usize,
    pub coupling_residual: T,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport<T> {
    pub width: usize,
    pub height: usize,
    pub warps: Vec<WarpReport<T>>,
}

/// Flow at full resolution with per-level diagnostics, coarsest level
/// first.
#[derive(Debug, Clone)]
pub struct Estimate<T> {
    pub flow: FlowField<T>,
    pub levels: Vec<LevelReport<T>>,
}

impl<T: Scalar> Estimate<T> {
    /// Largest final coupling residual over all ADMM runs.
    pub fn worst_coupling_residual(&self) -> T {
        self.levels
            .iter()
            .flat_map(|l| &l.warps)
            .fold(T::zero(), |m, w| m.max(w.coupling_residual))
    }

    pub fn all_converged(&self) -> bool {
        self.levels.iter().flat_map(|l| &l.warps).all(|w| w.converged)
    }
}

/// Estimates the flow from `first` to `second`, starting from zero at the
/// coarsest level.
pub fn coarse_to_fine_estimate<T: Scalar>(
    first: &Image<T>,
    second: &Image<T>,
    matches: Option<&SparseMatches<T>>,
    solver: &SolverConfig<T>,
    pyramid: &PyramidConfig<T>,
) -> Result<Estimate<T>> {
    if first.shape() != second.shape() {
        return Err(Error::ShapeMismatch {
            expected: first.shape(),
            found: second.shape(),
        });
    }
    if let Some(m) = matches {
        if m.shape() != first.shape() {
            return Err(Error::ShapeMismatch {
                expected: first.shape(),
                found: m.shape(),
            });
        }
    }
    solver.validate()?;
    let p1 = build_pyramid(first, pyramid)?;
    let p2 = build_pyramid(second, pyramid)?;
    let (full_w, full_h) = first.shape();
    let coarsest = p1.len() - 1;
    let (cw, ch) = p1[coarsest].shape();
    let mut flow = FlowField::zeros(cw, ch)?;
    let mut levels = Vec::with_capacity(p1.len());

    for level in (0..=coarsest).rev() {
        let (i1, i2) = (&p1[level], &p2[level]);
        let (w, h) = i1.shape();
        if flow.shape() != (w, h) {
            flow = resize_flow(&flow, w, h);
        }
        let level_matches = match matches {
            Some(m) if level == 0 => Some(m.clone()),
            Some(m) => Some(m.rescaled(
                w,
                h,
                T::of_usize(w) / T::of_usize(full_w),
                T::of_usize(h) / T::of_usize(full_h),
            )?),
            None => None,
        };
        let mut report = LevelReport {
            width: w,
            height: h,
            warps: Vec::with_capacity(pyramid.warps),
        };
        for warp in 0..pyramid.warps {
            let (warped, valid) = warp_image(i2, &flow)?;
            let data = linearize(i1, &warped, &valid)?.about(&flow)?;
            let solution = admm_solve(&data, level_matches.as_ref(), &flow, solver)?;
            debug!(
                "level {level} ({w}x{h}) warp {warp}: {} iterations, coupling {}",
                solution.iterations, solution.coupling_residual
            );
            report.warps.push(WarpReport {
                iterations: solution.iterations,
                coupling_residual: solution.coupling_residual,
                converged: solution.converged,
            });
            let last = level == 0 && warp + 1 == pyramid.warps;
            flow = if pyramid.median_window > 1 && (!last || pyramid.median_on_output) {
                weighted_median_filter(&solution.flow, i1, pyramid.median_window, pyramid.median_sigma)?
            } else {
                solution.flow
            };
        }
        info!(
            "level {level} ({w}x{h}) done, max coupling residual {}",
            report.warps.iter().fold(T::zero(), |m, r| m.max(r.coupling_residual))
        );
        levels.push(report);
    }

    Ok(Estimate { flow, levels })
}
