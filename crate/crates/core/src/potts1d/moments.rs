use crate::scalar::Scalar;

use super::LineSignal;

/// Least-squares line `a·p + b` on one interval and its residual sum of
/// squares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFit<T> {
    pub slope: T,
    pub intercept: T,
    pub error: T,
}

impl<T: Scalar> AffineFit<T> {
    #[inline]
    pub fn value_at(&self, p: usize) -> T {
        self.slope * T::of_usize(p) + self.intercept
    }
}

/// Compensated prefix sums: `hi[t] + lo[t]` is `Σ_{p≤t}` of the pushed
/// terms with the rounding error of each addition carried in `lo`. Interval
/// sums near the end of long lines would otherwise lose most of their digits
/// to cancellation.
#[derive(Debug, Clone, Default)]
struct Prefix<T> {
    hi: Vec<T>,
    lo: Vec<T>,
}

impl<T: Scalar> Prefix<T> {
    fn reset(&mut self, n: usize) {
        self.hi.clear();
        self.lo.clear();
        self.hi.reserve(n + 1);
        self.lo.reserve(n + 1);
        self.hi.push(T::zero());
        self.lo.push(T::zero());
    }

    fn push(&mut self, term: T) {
        let (a, c) = (self.hi[self.hi.len() - 1], self.lo[self.lo.len() - 1]);
        // Knuth's two-sum.
        let s = a + term;
        let bb = s - a;
        let err = (a - (s - bb)) + (term - bb);
        self.hi.push(s);
        self.lo.push(c + err);
    }

    #[inline]
    fn range(&self, l: usize, r: usize) -> T {
        (self.hi[r] - self.hi[l - 1]) + (self.lo[r] - self.lo[l - 1])
    }
}

#[derive(Debug, Clone, Default)]
struct ChannelMoments<T> {
    /// `Σ w g p`
    gp: Prefix<T>,
    /// `Σ w g`
    g: Prefix<T>,
    /// `Σ w g²`
    gg: Prefix<T>,
}

/// Prefix sums of the weighted moments of one line.
///
/// Index `t` holds the sum over `p ≤ t`; index 0 is zero. The abscissa
/// moments `Σ w p²`, `Σ w p`, `Σ w` do not depend on the data, the
/// remaining three are kept per channel.
#[derive(Debug, Clone, Default)]
pub struct MomentTable<T> {
    pp: Prefix<T>,
    p: Prefix<T>,
    w: Prefix<T>,
    channels: Vec<ChannelMoments<T>>,
}

/// Relative threshold on `E·H − G²` below which a fit is treated as
/// singular.
const SINGULAR_RTOL: f64 = 1e-12;

impl<T: Scalar> MomentTable<T> {
    pub fn new(signal: &LineSignal<T>) -> Self {
        let mut table = Self::default();
        table.rebuild(signal);
        table
    }

    /// Recomputes all prefix sums for `signal`, reusing allocations.
    pub fn rebuild(&mut self, signal: &LineSignal<T>) {
        let n = signal.len();
        self.pp.reset(n);
        self.p.reset(n);
        self.w.reset(n);
        for p in 1..=n {
            let wp = signal.weight(p);
            let pf = T::of_usize(p);
            self.w.push(wp);
            self.p.push(wp * pf);
            self.pp.push(wp * pf * pf);
        }

        self.channels
            .resize_with(signal.num_channels(), ChannelMoments::default);
        for (t, ch) in self.channels.iter_mut().enumerate() {
            ch.gp.reset(n);
            ch.g.reset(n);
            ch.gg.reset(n);
            for (i, &g) in signal.channel(t).iter().enumerate() {
                let p = i + 1;
                let wg = signal.weight(p) * g;
                ch.gp.push(wg * T::of_usize(p));
                ch.g.push(wg);
                ch.gg.push(wg * g);
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.w.hi.len() - 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    /// Prefix sums `E′_t = Σ_{p≤t} w_p p²` (leading part, without the
    /// compensation term).
    pub fn sum_pp(&self) -> &[T] {
        &self.pp.hi
    }

    /// Prefix sums `G′_t = Σ_{p≤t} w_p p`.
    pub fn sum_p(&self) -> &[T] {
        &self.p.hi
    }

    /// Prefix sums `H′_t = Σ_{p≤t} w_p`.
    pub fn sum_w(&self) -> &[T] {
        &self.w.hi
    }

    /// Prefix sums `I′_t = Σ_{p≤t} w_p g_p p` of channel `t`.
    pub fn sum_gp(&self, channel: usize) -> &[T] {
        &self.channels[channel].gp.hi
    }

    /// Prefix sums `J′_t = Σ_{p≤t} w_p g_p` of channel `t`.
    pub fn sum_g(&self, channel: usize) -> &[T] {
        &self.channels[channel].g.hi
    }

    /// Prefix sums `K′_t = Σ_{p≤t} w_p g_p²` of channel `t`.
    pub fn sum_gg(&self, channel: usize) -> &[T] {
        &self.channels[channel].gg.hi
    }

    #[inline]
    fn geometry(&self, l: usize, r: usize) -> (T, T, T) {
        (self.pp.range(l, r), self.p.range(l, r), self.w.range(l, r))
    }

    /// Centred second moment `E − G²/H`, or `None` when the normal
    /// equations are singular.
    #[inline]
    fn spread(l: usize, r: usize, e: T, g: T, h: T) -> Option<T> {
        if l == r {
            return None;
        }
        let det = e * h - g * g;
        if det <= T::of(SINGULAR_RTOL) * e * h {
            return None;
        }
        Some(det / h)
    }

    /// Optimal line on `l..=r` (1-based, inclusive) for `channel`.
    ///
    /// A single sample fits exactly with slope zero.
    pub fn fit(&self, l: usize, r: usize, channel: usize) -> AffineFit<T> {
        debug_assert!(1 <= l && l <= r && r <= self.len());
        let (e, g, h) = self.geometry(l, r);
        let ch = &self.channels[channel];
        let i = ch.gp.range(l, r);
        let j = ch.g.range(l, r);
        let k = ch.gg.range(l, r);
        let syy = k - j * j / h;
        match Self::spread(l, r, e, g, h) {
            Some(sxx) => {
                let sxy = i - g * j / h;
                let slope = sxy / sxx;
                let intercept = (j - slope * g) / h;
                let error = (syy - sxy * sxy / sxx).max(T::zero());
                AffineFit {
                    slope,
                    intercept,
                    error,
                }
            }
            None => AffineFit {
                slope: T::zero(),
                intercept: j / h,
                error: if l == r { T::zero() } else { syy.max(T::zero()) },
            },
        }
    }

    /// `Σ_t ε_{l r t}`: approximation error of `l..=r` summed over channels.
    #[inline]
    pub fn interval_error(&self, l: usize, r: usize) -> T {
        if l == r {
            return T::zero();
        }
        let (e, g, h) = self.geometry(l, r);
        let sxx = Self::spread(l, r, e, g, h);
        let mut total = T::zero();
        for ch in &self.channels {
            let j = ch.g.range(l, r);
            let k = ch.gg.range(l, r);
            let syy = k - j * j / h;
            let err = match sxx {
                Some(sxx) => {
                    let sxy = ch.gp.range(l, r) - g * j / h;
                    syy - sxy * sxy / sxx
                }
                None => syy,
            };
            total += err.max(T::zero());
        }
        total
    }
}

pub fn build_moments<T: Scalar>(signal: &LineSignal<T>) -> MomentTable<T> {
    MomentTable::new(signal)
}

/// Least-squares line of `channel` on the interval `l..=r` (1-based,
/// inclusive).
pub fn interval_affine_fit<T: Scalar>(moments: &MomentTable<T>, l: usize, r: usize, channel: usize) -> AffineFit<T> {
    moments.fit(l, r, channel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn abscissa_square_prefix() {
        let s = LineSignal::scalar(vec![0.0f64; 3]).unwrap();
        let m = build_moments(&s);
        assert_eq!(m.sum_pp(), &[0.0, 1.0, 5.0, 14.0]);
        assert_eq!(m.sum_p(), &[0.0, 1.0, 3.0, 6.0]);
        assert_eq!(m.sum_w(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn single_sample_moments() {
        let m = build_moments(&LineSignal::scalar(vec![7.0f64]).unwrap());
        assert_eq!(m.sum_g(0), &[0.0, 7.0]);
        assert_eq!(m.sum_gg(0), &[0.0, 49.0]);
        assert_eq!(m.sum_gp(0), &[0.0, 7.0]);
    }

    #[test]
    fn interval_moments_match_direct_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 50;
        let g: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let s = LineSignal::weighted(vec![g.clone()], Some(w.clone())).unwrap();
        let m = build_moments(&s);
        for l in 1..=n {
            for r in l..=n {
                let d = |f: &dyn Fn(usize) -> f64| (l..=r).map(f).sum::<f64>();
                let pf = |p: usize| p as f64;
                let cases = [
                    (m.sum_pp()[r] - m.sum_pp()[l - 1], d(&|p| w[p - 1] * pf(p) * pf(p))),
                    (m.sum_p()[r] - m.sum_p()[l - 1], d(&|p| w[p - 1] * pf(p))),
                    (m.sum_w()[r] - m.sum_w()[l - 1], d(&|p| w[p - 1])),
                    (m.sum_gp(0)[r] - m.sum_gp(0)[l - 1], d(&|p| w[p - 1] * g[p - 1] * pf(p))),
                    (m.sum_g(0)[r] - m.sum_g(0)[l - 1], d(&|p| w[p - 1] * g[p - 1])),
                    (
                        m.sum_gg(0)[r] - m.sum_gg(0)[l - 1],
                        d(&|p| w[p - 1] * g[p - 1] * g[p - 1]),
                    ),
                ];
                for (got, want) in cases {
                    assert!(
                        (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                        "{l}..{r}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn exact_line_fits_without_error() {
        let g: Vec<f64> = (1..=5).map(|p| 2.0 * p as f64 + 1.0).collect();
        let m = build_moments(&LineSignal::scalar(g).unwrap());
        let fit = interval_affine_fit(&m, 1, 5, 0);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!(fit.error.abs() < 1e-12);
    }

    #[test]
    fn singleton_contract() {
        let m = build_moments(&LineSignal::scalar(vec![7.0f64]).unwrap());
        let fit = interval_affine_fit(&m, 1, 1, 0);
        assert_eq!(
            fit,
            AffineFit {
                slope: 0.0,
                intercept: 7.0,
                error: 0.0
            }
        );
    }

    #[test]
    fn pairs_interpolate() {
        let m = build_moments(&LineSignal::scalar(vec![3.0f64, -1.0, 4.0]).unwrap());
        let fit = m.fit(2, 3, 0);
        assert!(fit.error.abs() < 1e-12);
        assert!((fit.value_at(2) + 1.0).abs() < 1e-12);
        assert!((fit.value_at(3) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn interval_error_sums_channels() {
        let s = LineSignal::new(vec![vec![0.0f64, 1.0, 0.0, 1.0], vec![2.0, 0.0, 0.0, 2.0]]).unwrap();
        let m = build_moments(&s);
        let total = m.fit(1, 4, 0).error + m.fit(1, 4, 1).error;
        assert!((m.interval_error(1, 4) - total).abs() < 1e-12);
    }
}
