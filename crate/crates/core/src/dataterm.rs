//! Pointwise proximal steps of the linearized brightness-constancy term
//! `|∇I·w + I_t|` and of the sparse-match term `γ·c·‖u − m‖₁`.

use rayon::prelude::*;

use crate::error::{invalid_param, Error, Result};
use crate::grid::{FlowField, PixelMask};
use crate::scalar::Scalar;

/// Below this squared gradient norm the data term is treated as constant.
const FLAT_GRADIENT: f64 = 1e-12;

/// Per-pixel spatial gradient of the (warped) second frame and the
/// temporal term of the linearized constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedData<T> {
    width: usize,
    height: usize,
    grad_x: Vec<T>,
    grad_y: Vec<T>,
    temporal: Vec<T>,
}

impl<T: Scalar> LinearizedData<T> {
    pub fn new(width: usize, height: usize, grad_x: Vec<T>, grad_y: Vec<T>, temporal: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions { width, height });
        }
        let n = width * height;
        if grad_x.len() != n || grad_y.len() != n || temporal.len() != n {
            return Err(invalid_param("data", "buffer length does not match grid"));
        }
        if grad_x.iter().chain(&grad_y).chain(&temporal).any(|v| !v.is_finite()) {
            return Err(invalid_param("data", "non-finite gradient or temporal term"));
        }
        Ok(Self {
            width,
            height,
            grad_x,
            grad_y,
            temporal,
        })
    }

    /// Data with zero gradient and zero temporal difference everywhere.
    pub fn flat(width: usize, height: usize) -> Result<Self> {
        let n = width * height;
        Self::new(
            width,
            height,
            vec![T::zero(); n],
            vec![T::zero(); n],
            vec![T::zero(); n],
        )
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn gradient(&self, index: usize) -> [T; 2] {
        [self.grad_x[index], self.grad_y[index]]
    }

    #[inline]
    pub fn temporal(&self, index: usize) -> T {
        self.temporal[index]
    }

    pub fn grad_x(&self) -> &[T] {
        &self.grad_x
    }

    pub fn grad_y(&self) -> &[T] {
        &self.grad_y
    }

    pub fn temporal_plane(&self) -> &[T] {
        &self.temporal
    }

    /// Signed residual `∇I·w + I_t` at pixel `index`.
    #[inline]
    pub fn residual(&self, index: usize, w: [T; 2]) -> T {
        residual(self.gradient(index), self.temporal(index), w)
    }

    /// `Σ_x |∇I·w(x) + I_t(x)|`.
    pub fn energy(&self, w: &FlowField<T>) -> T {
        (0..w.len()).map(|i| self.residual(i, w.at(i)).abs()).sum()
    }
}

#[inline]
pub fn residual<T: Scalar>(grad: [T; 2], temporal: T, w: [T; 2]) -> T {
    grad[0] * w[0] + grad[1] * w[1] + temporal
}

/// Minimizer of `|∇I·w + I_t| + (weight/2)·‖w − r‖²` at one pixel.
#[inline]
pub fn prox_w_pixel<T: Scalar>(grad: [T; 2], temporal: T, r: [T; 2], weight: T) -> [T; 2] {
    let norm2 = grad[0] * grad[0] + grad[1] * grad[1];
    if norm2 < T::of(FLAT_GRADIENT) {
        return r;
    }
    let rho = residual(grad, temporal, r);
    let threshold = norm2 / weight;
    let step = if rho < -threshold {
        weight.recip()
    } else if rho > threshold {
        -weight.recip()
    } else {
        -rho / norm2
    };
    [r[0] + step * grad[0], r[1] + step * grad[1]]
}

fn check_shape<T: Scalar>(data: &LinearizedData<T>, field: &FlowField<T>) -> Result<()> {
    if data.shape() != field.shape() {
        return Err(Error::ShapeMismatch {
            expected: data.shape(),
            found: field.shape(),
        });
    }
    Ok(())
}

fn map_pixels<T: Scalar>(field: &FlowField<T>, f: impl Fn(usize, [T; 2]) -> [T; 2] + Sync) -> FlowField<T> {
    let (u, v): (Vec<T>, Vec<T>) = (0..field.len())
        .into_par_iter()
        .map(|i| {
            let [a, b] = f(i, field.at(i));
            (a, b)
        })
        .unzip();
    FlowField::from_raw(field.width(), field.height(), u, v)
}

/// Thresholding step for `min_w ρ_d(w) + (weight/2)·‖w − r‖²`, where
/// `weight = ηK` in the base model.
pub fn prox_w<T: Scalar>(data: &LinearizedData<T>, r: &FlowField<T>, weight: T) -> Result<FlowField<T>> {
    check_shape(data, r)?;
    if !(weight > T::zero()) {
        return Err(invalid_param("eta*K", "quadratic weight must be positive"));
    }
    Ok(map_pixels(r, |i, ri| {
        prox_w_pixel(data.gradient(i), data.temporal(i), ri, weight)
    }))
}

/// w-step of the model with sparse matches:
/// `min_w ρ_d(w) + ((η₁K + η₂)/2)·‖w − t‖²`.
///
/// The thresholds use the full quadratic weight `η₁K + η₂`, which is what
/// makes the step an exact minimizer.
pub fn prox_w_extended<T: Scalar>(
    data: &LinearizedData<T>,
    t: &FlowField<T>,
    eta1_k: T,
    eta2: T,
) -> Result<FlowField<T>> {
    if !(eta1_k > T::zero()) || eta2 < T::zero() {
        return Err(invalid_param("eta", "need eta1*K > 0 and eta2 >= 0"));
    }
    prox_w(data, t, eta1_k + eta2)
}

/// Sparse displacement constraints `m` on the support `Λ = {c = 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatches<T> {
    displacement: FlowField<T>,
    support: PixelMask,
    /// Accepted matches in insertion order.
    entries: Vec<Match<T>>,
}

/// One correspondence: pixel `(x, y)` of the first frame moves by `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match<T> {
    pub x: usize,
    pub y: usize,
    pub d: [T; 2],
}

impl<T: Scalar> SparseMatches<T> {
    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Ok(Self {
            displacement: FlowField::zeros(width, height)?,
            support: PixelMask::filled(width, height, false)?,
            entries: Vec::new(),
        })
    }

    /// Rasterizes a list of matches. Out-of-grid entries are dropped and
    /// counted; for duplicate pixels the first entry wins.
    pub fn from_matches(
        width: usize,
        height: usize,
        matches: impl IntoIterator<Item = Match<T>>,
    ) -> Result<(Self, usize)> {
        let mut out = Self::empty(width, height)?;
        let mut rejected = 0;
        for m in matches {
            if m.x >= width || m.y >= height {
                rejected += 1;
                continue;
            }
            if !(m.d[0].is_finite() && m.d[1].is_finite()) {
                return Err(invalid_param("matches", "non-finite displacement"));
            }
            if !out.support.get(m.x, m.y) {
                out.support.set(m.x, m.y, true);
                out.displacement.set(m.x, m.y, m.d);
                out.entries.push(m);
            }
        }
        Ok((out, rejected))
    }

    pub fn shape(&self) -> (usize, usize) {
        self.support.shape()
    }

    pub fn displacement(&self) -> &FlowField<T> {
        &self.displacement
    }

    pub fn support(&self) -> &PixelMask {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Accepted matches in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = Match<T>> + '_ {
        self.entries.iter().copied()
    }

    /// Transfers the matches to a `width × height` grid whose pixel pitch is
    /// `1/sx`, `1/sy` of this one: positions snap to the nearest pixel and
    /// displacements scale with the grid. Collisions keep the earliest.
    pub fn rescaled(&self, width: usize, height: usize, sx: T, sy: T) -> Result<Self> {
        let moved = self.entries.iter().map(|m| {
            let snap = |c: usize, s: T, n: usize| {
                let v = (T::of_usize(c) * s).round().max(T::zero());
                v.to_usize().unwrap_or(0).min(n - 1)
            };
            Match {
                x: snap(m.x, sx, width),
                y: snap(m.y, sy, height),
                d: [m.d[0] * sx, m.d[1] * sy],
            }
        });
        Ok(Self::from_matches(width, height, moved)?.0)
    }
}

/// Componentwise soft threshold of `v` towards `m` on `Λ`, identity
/// elsewhere: minimizer of `γ·c·‖u − m‖₁ + (η₂/2)·‖u − v‖²`.
pub fn prox_u<T: Scalar>(matches: &SparseMatches<T>, v: &FlowField<T>, gamma: T, eta2: T) -> Result<FlowField<T>> {
    if matches.shape() != v.shape() {
        return Err(Error::ShapeMismatch {
            expected: matches.shape(),
            found: v.shape(),
        });
    }
    if !(eta2 > T::zero()) || gamma < T::zero() {
        return Err(invalid_param("eta2", "need eta2 > 0 and gamma >= 0"));
    }
    let shrink = gamma / eta2;
    let support = matches.support().data();
    Ok(map_pixels(v, |i, vi| {
        if !support[i] {
            return vi;
        }
        let m = matches.displacement().at(i);
        let mut u = vi;
        for k in 0..2 {
            let diff = vi[k] - m[k];
            u[k] = if diff < -shrink {
                vi[k] + shrink
            } else if diff > shrink {
                vi[k] - shrink
            } else {
                m[k]
            };
        }
        u
    }))
}
