use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::moments::{AffineFit, MomentTable};
use super::LineSignal;

/// One interval `first..=last` (1-based) of a segmentation with its
/// per-channel line fits.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<T> {
    pub first: usize,
    pub last: usize,
    pub fits: Vec<AffineFit<T>>,
}

impl<T: Scalar> Segment<T> {
    pub fn len(&self) -> usize {
        self.last + 1 - self.first
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn error(&self) -> T {
        self.fits.iter().map(|f| f.error).sum()
    }
}

/// Optimal partition of `1..=n` into intervals with affine fits.
///
/// `energy` is the Bellman value `κ·(#segments − 1) + Σ ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSegmentation<T> {
    n: usize,
    kappa: T,
    segments: Vec<Segment<T>>,
    energy: T,
}

impl<T: Scalar> LineSegmentation<T> {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn energy(&self) -> T {
        self.energy
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    /// Intervals as 1-based inclusive `(first, last)` pairs.
    pub fn intervals(&self) -> Vec<(usize, usize)> {
        self.segments.iter().map(|s| (s.first, s.last)).collect()
    }

    /// Last abscissa of every interval except the final one.
    pub fn breakpoints(&self) -> Vec<usize> {
        self.segments[..self.segments.len() - 1]
            .iter()
            .map(|s| s.last)
            .collect()
    }

    /// Piecewise-affine reconstruction `a·p + b` of one channel.
    pub fn fitted(&self, channel: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(self.n);
        for seg in &self.segments {
            let fit = &seg.fits[channel];
            out.extend((seg.first..=seg.last).map(|p| fit.value_at(p)));
        }
        out
    }

    pub fn fitted_into(&self, channel: usize, out: &mut [T]) {
        for seg in &self.segments {
            let fit = &seg.fits[channel];
            for p in seg.first..=seg.last {
                out[p - 1] = fit.value_at(p);
            }
        }
    }
}

/// Dynamic-programming solver for
/// `min_I κ·(|I| − 1) + Σ_{I∈I} Σ_t min_{a,b} Σ_{p∈I} w_p (a p + b − g_{pt})²`.
///
/// Holds reusable buffers so that many lines can be solved without
/// reallocating. With pruning enabled, left boundaries that cannot beat the
/// running optimum are skipped; the returned partition is unchanged.
#[derive(Debug, Clone)]
pub struct AffinePottsSolver<T> {
    pruning: bool,
    moments: MomentTable<T>,
    best: Vec<T>,
    arg: Vec<usize>,
    evaluated: u64,
}

impl<T: Scalar> Default for AffinePottsSolver<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> AffinePottsSolver<T> {
    pub fn new() -> Self {
        Self::with_pruning(true)
    }

    pub fn with_pruning(pruning: bool) -> Self {
        Self {
            pruning,
            moments: MomentTable::default(),
            best: Vec::new(),
            arg: Vec::new(),
            evaluated: 0,
        }
    }

    pub fn pruning(&self) -> bool {
        self.pruning
    }

    /// Number of interval errors evaluated by the most recent solve.
    pub fn evaluated_candidates(&self) -> u64 {
        self.evaluated
    }

    pub fn solve(&mut self, signal: &LineSignal<T>, kappa: T) -> LineSegmentation<T> {
        let kappa = kappa.max(T::zero());
        let n = signal.len();
        self.moments.rebuild(signal);
        self.best.clear();
        self.best.resize(n + 1, T::zero());
        self.arg.clear();
        self.arg.resize(n + 1, 1);
        self.evaluated = 0;

        // B*_0 = −κ makes the first interval free of the jump penalty.
        self.best[0] = -kappa;
        for r in 1..=n {
            // The jump-free candidate l = 1 seeds the bound; with a large
            // κ it already rules out every other left boundary.
            let mut best = self.moments.interval_error(1, r);
            let mut arg = 1;
            self.evaluated += 1;
            let mut best_hi = T::infinity();
            let mut arg_hi = r;
            // Descending l: interval errors grow as the interval extends
            // to the left, which is what the early exit relies on.
            for l in (2..=r).rev() {
                let bound = best.min(best_hi);
                let offset = self.best[l - 1] + kappa;
                if self.pruning && offset > bound {
                    continue;
                }
                let eps = self.moments.interval_error(l, r);
                self.evaluated += 1;
                // offset ≥ 0 for every l, so no l' < l can go below eps.
                if self.pruning && eps > bound {
                    break;
                }
                let cand = offset + eps;
                // ties resolve towards the smallest l
                if cand <= best_hi {
                    best_hi = cand;
                    arg_hi = l;
                }
            }
            if best_hi < best {
                best = best_hi;
                arg = arg_hi;
            }
            self.best[r] = best;
            self.arg[r] = arg;
        }

        let mut bounds = Vec::new();
        let mut r = n;
        while r > 0 {
            let l = self.arg[r];
            bounds.push((l, r));
            r = l - 1;
        }
        bounds.reverse();
        let segments = bounds
            .into_iter()
            .map(|(first, last)| Segment {
                first,
                last,
                fits: (0..signal.num_channels())
                    .map(|t| self.moments.fit(first, last, t))
                    .collect(),
            })
            .collect();
        LineSegmentation {
            n,
            kappa,
            segments,
            energy: self.best[n],
        }
    }
}

/// Exact minimizer of the vectorial piecewise-affine Potts functional with
/// jump penalty `kappa`.
pub fn solve_affine_potts<T: Scalar>(signal: &LineSignal<T>, kappa: T) -> LineSegmentation<T> {
    AffinePottsSolver::new().solve(signal, kappa)
}

/// Recomputes `κ·(|I| − 1) + Σ_I Σ_t min_{a,b} Σ_{p∈I} w_p (a p + b − g_{pt})²`
/// for an arbitrary partition by direct summation over each interval.
///
/// `intervals` are 1-based inclusive and must tile `1..=n` in order.
pub fn evaluate_segmentation<T: Scalar>(signal: &LineSignal<T>, kappa: T, intervals: &[(usize, usize)]) -> Result<T> {
    let n = signal.len();
    let bad = |reason: String| Error::InvalidPartition { n, reason };
    let mut next = 1;
    for &(l, r) in intervals {
        if l != next || r < l {
            return Err(bad(format!("interval ({l}, {r}) does not start at {next}")));
        }
        next = r + 1;
    }
    if next != n + 1 {
        return Err(bad(format!("intervals end at {} instead of {n}", next - 1)));
    }

    let mut total = kappa * T::of_usize(intervals.len() - 1);
    for &(l, r) in intervals {
        for t in 0..signal.num_channels() {
            total += direct_residual(signal, t, l, r);
        }
    }
    Ok(total)
}

/// Residual of the weighted least-squares line on `l..=r`, from centred
/// sums accumulated sample by sample.
fn direct_residual<T: Scalar>(signal: &LineSignal<T>, t: usize, l: usize, r: usize) -> T {
    if l == r {
        return T::zero();
    }
    let g = signal.channel(t);
    let (mut sw, mut sp, mut sg) = (T::zero(), T::zero(), T::zero());
    for p in l..=r {
        let w = signal.weight(p);
        sw += w;
        sp += w * T::of_usize(p);
        sg += w * g[p - 1];
    }
    let (pm, gm) = (sp / sw, sg / sw);
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for p in l..=r {
        let w = signal.weight(p);
        let dp = T::of_usize(p) - pm;
        sxx += w * dp * dp;
        sxy += w * dp * (g[p - 1] - gm);
    }
    let slope = sxy / sxx;
    (l..=r)
        .map(|p| {
            let res = gm + slope * (T::of_usize(p) - pm) - g[p - 1];
            signal.weight(p) * res * res
        })
        .sum()
}
