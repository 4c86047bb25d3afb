//! One-dimensional vector-valued piecewise-affine (Potts) and total
//! variation solvers.
//!
//! Sample positions are the abscissae `p = 1, …, n`. Intervals are given
//! as 1-based inclusive pairs `(l, r)`.

mod affine;
mod moments;
mod tv;

pub use affine::{evaluate_segmentation, solve_affine_potts, AffinePottsSolver, LineSegmentation, Segment};
pub use moments::{build_moments, interval_affine_fit, AffineFit, MomentTable};
pub use tv::{solve_tv_line, tv_denoise};

use crate::error::{invalid_param, Result};
use crate::scalar::Scalar;

/// `T` scalar channels sampled on `p = 1, …, n`, with optional positive
/// per-sample weights.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSignal<T> {
    channels: Vec<Vec<T>>,
    weights: Option<Vec<T>>,
}

impl<T: Scalar> LineSignal<T> {
    pub fn new(channels: Vec<Vec<T>>) -> Result<Self> {
        Self::weighted(channels, None)
    }

    pub fn weighted(channels: Vec<Vec<T>>, weights: Option<Vec<T>>) -> Result<Self> {
        let n = channels.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(invalid_param("signal", "at least one non-empty channel required"));
        }
        if channels.iter().any(|c| c.len() != n) {
            return Err(invalid_param("signal", "channels differ in length"));
        }
        if channels.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid_param("signal", "non-finite sample"));
        }
        if let Some(w) = &weights {
            if w.len() != n {
                return Err(invalid_param("weights", "one weight per sample required"));
            }
            if w.iter().any(|w| !(w.is_finite() && *w > T::zero())) {
                return Err(invalid_param("weights", "weights must be positive"));
            }
        }
        Ok(Self { channels, weights })
    }

    /// Single-channel convenience constructor.
    pub fn scalar(samples: Vec<T>) -> Result<Self> {
        Self::new(vec![samples])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    #[inline]
    pub fn channel(&self, t: usize) -> &[T] {
        &self.channels[t]
    }

    pub fn channels(&self) -> &[Vec<T>] {
        &self.channels
    }

    pub fn weights(&self) -> Option<&[T]> {
        self.weights.as_deref()
    }

    /// Weight of the sample at abscissa `p` (1-based).
    #[inline]
    pub fn weight(&self, p: usize) -> T {
        self.weights.as_ref().map_or(T::one(), |w| w[p - 1])
    }

    /// The same samples in reverse order.
    pub fn reversed(&self) -> Self {
        let rev = |v: &Vec<T>| v.iter().rev().copied().collect::<Vec<_>>();
        Self {
            channels: self.channels.iter().map(rev).collect(),
            weights: self.weights.as_ref().map(rev),
        }
    }
}
