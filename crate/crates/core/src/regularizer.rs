//! Directional z-updates: each scan line of direction `d_k` is solved as an
//! independent 1D problem and written back in place.
//!
//! For a line with samples `v(p)`, the affine-l0 mode solves
//! `min κ·#jumps + Σ_p ‖v(p) − z(p)‖²` with `z` piecewise affine in the
//! line abscissa and jumps shared by both flow components. The tv mode
//! solves `min (κ/2)·Σ_p |z(p+1) − z(p)| + ½·Σ_p (v(p) − z(p))²` per
//! component, i.e. the same quadratic coupling with an anisotropic TV
//! penalty of weight `α_k λ / η`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{invalid_param, Error, Result};
use crate::grid::{enumerate_scan_paths, Direction, DirectionSet, FlowField, ScanPath};
use crate::potts1d::{tv_denoise, AffinePottsSolver, LineSegmentation, LineSignal};
use crate::scalar::Scalar;

/// Line model used in the z-updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegularizerMode {
    /// Piecewise-affine lines with an `ℓ0` jump penalty.
    #[default]
    AffineL0,
    /// Directional total variation.
    Tv,
}

impl fmt::Display for RegularizerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AffineL0 => "affine-l0",
            Self::Tv => "tv",
        })
    }
}

impl FromStr for RegularizerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "affine-l0" | "affine" | "l0" => Ok(Self::AffineL0),
            "tv" => Ok(Self::Tv),
            other => Err(invalid_param("mode", format!("unknown regularizer mode {other:?}"))),
        }
    }
}

/// Input of one z-update: `v = w + μ_k/η`, the direction `d_k` and the
/// jump penalty `κ = 2 α_k λ / η`.
#[derive(Debug, Clone)]
pub struct DirectionalUpdateRequest<'a, T> {
    pub v: &'a FlowField<T>,
    pub direction: Direction,
    pub kappa: T,
}

/// Scan-path decomposition of one grid for every direction of a set.
#[derive(Debug, Clone)]
pub struct DirectionalRegularizer {
    width: usize,
    height: usize,
    paths: Vec<(Direction, Vec<Vec<usize>>)>,
}

impl DirectionalRegularizer {
    pub fn new<T: Scalar>(width: usize, height: usize, directions: &DirectionSet<T>) -> Result<Self> {
        Self::for_directions(width, height, directions.directions())
    }

    pub fn for_directions(width: usize, height: usize, directions: &[Direction]) -> Result<Self> {
        let paths = directions
            .iter()
            .map(|&d| {
                let lines = enumerate_scan_paths(width, height, d)?
                    .iter()
                    .map(|p| p.linear_indices(width))
                    .collect();
                Ok((d, lines))
            })
            .collect::<Result<_>>()?;
        Ok(Self { width, height, paths })
    }

    /// Solves every scan line of the `k`-th direction for `v`.
    pub fn update<T: Scalar>(
        &self,
        k: usize,
        v: &FlowField<T>,
        kappa: T,
        mode: RegularizerMode,
    ) -> Result<FlowField<T>> {
        if v.shape() != (self.width, self.height) {
            return Err(Error::ShapeMismatch {
                expected: (self.width, self.height),
                found: v.shape(),
            });
        }
        if !(kappa >= T::zero()) {
            return Err(invalid_param("kappa", "jump penalty must be non-negative"));
        }
        let lines = &self.paths[k].1;
        let solved: Vec<(Vec<T>, Vec<T>)> = match mode {
            RegularizerMode::AffineL0 => lines
                .par_iter()
                .map_init(AffinePottsSolver::new, |solver, idx| {
                    let signal = gather(v, idx);
                    let seg = solver.solve(&signal, kappa);
                    (seg.fitted(0), seg.fitted(1))
                })
                .collect(),
            RegularizerMode::Tv => {
                let lambda = kappa / T::of(2.0);
                lines
                    .par_iter()
                    .map(|idx| {
                        let mut out = [vec![T::zero(); idx.len()], vec![T::zero(); idx.len()]];
                        for (c, o) in v.channels().iter().zip(out.iter_mut()) {
                            let line: Vec<T> = idx.iter().map(|&i| c[i]).collect();
                            tv_denoise(&line, lambda, o);
                        }
                        let [a, b] = out;
                        (a, b)
                    })
                    .collect()
            }
        };
        let mut z = v.clone();
        for (idx, (a, b)) in lines.iter().zip(solved) {
            for (j, &i) in idx.iter().enumerate() {
                z.set_at(i, [a[j], b[j]]);
            }
        }
        Ok(z)
    }
}

fn gather<T: Scalar>(v: &FlowField<T>, idx: &[usize]) -> LineSignal<T> {
    let [u, w] = v.channels();
    LineSignal::new(vec![
        idx.iter().map(|&i| u[i]).collect(),
        idx.iter().map(|&i| w[i]).collect(),
    ])
    .expect("flow samples are finite")
}

/// One-shot z-update for a single direction.
pub fn update_z<T: Scalar>(request: &DirectionalUpdateRequest<'_, T>, mode: RegularizerMode) -> Result<FlowField<T>> {
    let (w, h) = request.v.shape();
    DirectionalRegularizer::for_directions(w, h, &[request.direction])?.update(0, request.v, request.kappa, mode)
}

/// Flow samples `z(p) = (a₁ p + b₁, a₂ p + b₂)` along a path, recovered from
/// the per-interval line parameters without forming a full parameter field.
pub fn flow_from_segmentation<T: Scalar>(path: &ScanPath, segmentation: &LineSegmentation<T>) -> Result<Vec<[T; 2]>> {
    if path.len() != segmentation.len() {
        return Err(invalid_param("segmentation", "length differs from path"));
    }
    if segmentation.segments().iter().any(|s| s.fits.len() != 2) {
        return Err(invalid_param("segmentation", "flow lines need exactly two channels"));
    }
    let (a, b) = (segmentation.fitted(0), segmentation.fitted(1));
    Ok(a.into_iter().zip(b).map(|(x, y)| [x, y]).collect())
}
