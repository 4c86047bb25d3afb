use crate::scalar::Scalar;

use super::LineSignal;

/// Exact minimizer of `λ·Σ|x_{p+1} − x_p| + ½·Σ(x_p − g_p)²`.
///
/// Direct taut-string scheme: the string is tracked through its lower and
/// upper tube boundaries and a segment is emitted as soon as the tube
/// forces a bend. Linear time in practice.
pub fn tv_denoise<T: Scalar>(input: &[T], lambda: T, output: &mut [T]) {
    let n = input.len();
    assert_eq!(output.len(), n, "output length must match input");
    if n == 0 {
        return;
    }
    if !(lambda > T::zero()) {
        output.copy_from_slice(input);
        return;
    }
    let two_lambda = lambda + lambda;
    let min_lambda = -lambda;

    let (mut k, mut k0, mut k_minus, mut k_plus) = (0usize, 0usize, 0usize, 0usize);
    let mut u_min = lambda;
    let mut u_max = min_lambda;
    let mut v_min = input[0] - lambda;
    let mut v_max = input[0] + lambda;

    loop {
        while k == n - 1 {
            if u_min < T::zero() {
                while k0 <= k_minus {
                    output[k0] = v_min;
                    k0 += 1;
                }
                k = k0;
                k_minus = k0;
                v_min = input[k0];
                u_min = lambda;
                u_max = v_min + u_min - v_max;
            } else if u_max > T::zero() {
                while k0 <= k_plus {
                    output[k0] = v_max;
                    k0 += 1;
                }
                k = k0;
                k_plus = k0;
                v_max = input[k0];
                u_max = min_lambda;
                u_min = v_max + u_max - v_min;
            } else {
                v_min += u_min / T::of_usize(k - k0 + 1);
                while k0 <= k {
                    output[k0] = v_min;
                    k0 += 1;
                }
                return;
            }
        }

        u_min += input[k + 1] - v_min;
        u_max += input[k + 1] - v_max;
        if u_min < min_lambda {
            // negative jump
            while k0 <= k_minus {
                output[k0] = v_min;
                k0 += 1;
            }
            k = k0;
            k_minus = k0;
            k_plus = k0;
            v_min = input[k0];
            v_max = v_min + two_lambda;
            u_min = lambda;
            u_max = min_lambda;
        } else if u_max > lambda {
            // positive jump
            while k0 <= k_plus {
                output[k0] = v_max;
                k0 += 1;
            }
            k = k0;
            k_minus = k0;
            k_plus = k0;
            v_max = input[k0];
            v_min = v_max - two_lambda;
            u_min = lambda;
            u_max = min_lambda;
        } else {
            k += 1;
            if u_min >= lambda {
                k_minus = k;
                v_min += (u_min - lambda) / T::of_usize(k_minus - k0 + 1);
                u_min = lambda;
            }
            if u_max <= min_lambda {
                k_plus = k;
                v_max += (u_max + lambda) / T::of_usize(k_plus - k0 + 1);
                u_max = min_lambda;
            }
        }
    }
}

/// Channelwise 1D TV denoising with weight `lambda`. Sample weights of the
/// signal are ignored.
pub fn solve_tv_line<T: Scalar>(signal: &LineSignal<T>, lambda: T) -> LineSignal<T> {
    let channels = signal
        .channels()
        .iter()
        .map(|g| {
            let mut out = vec![T::zero(); g.len()];
            tv_denoise(g, lambda, &mut out);
            out
        })
        .collect();
    LineSignal::weighted(channels, signal.weights().map(<[T]>::to_vec)).expect("denoised signal keeps shape")
}
