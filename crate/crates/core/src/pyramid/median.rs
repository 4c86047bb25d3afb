use rayon::prelude::*;

use crate::error::{invalid_param, Error, Result};
use crate::grid::{FlowField, Image};
use crate::scalar::Scalar;

/// Smallest value whose cumulative weight reaches half of the total.
/// `samples` is reordered.
pub fn weighted_median<T: Scalar>(samples: &mut [(T, T)]) -> T {
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite samples"));
    let total: T = samples.iter().map(|s| s.1).sum();
    let half = total / T::of(2.0);
    let mut acc = T::zero();
    for &(v, w) in samples.iter() {
        acc += w;
        if acc >= half {
            return v;
        }
    }
    samples[samples.len() - 1].0
}

/// Per-component weighted median over a `window × window` neighbourhood
/// (truncated at the borders), weighting each neighbour `y` of `x` by
/// `exp(−(I(x) − I(y))² / (2σ²))` from `guide`.
pub fn weighted_median_filter<T: Scalar>(
    flow: &FlowField<T>,
    guide: &Image<T>,
    window: usize,
    sigma: T,
) -> Result<FlowField<T>> {
    if window.is_multiple_of(2) {
        return Err(invalid_param("median_window", "window size must be odd"));
    }
    if !(sigma > T::zero()) {
        return Err(invalid_param("median_sigma", "must be positive"));
    }
    if flow.shape() != guide.shape() {
        return Err(Error::ShapeMismatch {
            expected: flow.shape(),
            found: guide.shape(),
        });
    }
    let (w, h) = flow.shape();
    let r = window / 2;
    let inv = (T::of(2.0) * sigma * sigma).recip();
    let (u, v): (Vec<T>, Vec<T>) = (0..w * h)
        .into_par_iter()
        .map_init(
            || (Vec::with_capacity(window * window), Vec::with_capacity(window * window)),
            |(su, sv), i| {
                let (x, y) = (i % w, i / w);
                let centre = guide.get(x, y);
                su.clear();
                sv.clear();
                for ny in y.saturating_sub(r)..=(y + r).min(h - 1) {
                    for nx in x.saturating_sub(r)..=(x + r).min(w - 1) {
                        let d = guide.get(nx, ny) - centre;
                        let weight = (-(d * d) * inv).exp();
                        let [a, b] = flow.get(nx, ny);
                        su.push((a, weight));
                        sv.push((b, weight));
                    }
                }
                (weighted_median(su), weighted_median(sv))
            },
        )
        .unzip();
    Ok(FlowField::from_raw(w, h, u, v))
}
