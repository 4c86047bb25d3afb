//! Reference implementations that share no code with the library: brute
//! force, raw normal equations, grid search and plain iterative methods.

#![allow(dead_code)]

/// Weighted least-squares line through `(p, g_p)` for `p = l..=r`
/// (1-based), solved from the uncentred 2×2 normal equations.
pub fn normal_equations_fit(g: &[f64], w: Option<&[f64]>, l: usize, r: usize) -> (f64, f64, f64) {
    let wt = |p: usize| w.map_or(1.0, |w| w[p - 1]);
    if l == r {
        return (0.0, g[l - 1], 0.0);
    }
    let (mut s_pp, mut s_p, mut s_1, mut s_pg, mut s_g) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in l..=r {
        let (pf, gv, wv) = (p as f64, g[p - 1], wt(p));
        s_pp += wv * pf * pf;
        s_p += wv * pf;
        s_1 += wv;
        s_pg += wv * pf * gv;
        s_g += wv * gv;
    }
    let det = s_pp * s_1 - s_p * s_p;
    let a = (s_pg * s_1 - s_p * s_g) / det;
    let b = (s_pp * s_g - s_p * s_pg) / det;
    let res = (l..=r).map(|p| wt(p) * (a * p as f64 + b - g[p - 1]).powi(2)).sum();
    (a, b, res)
}

/// Minimum of `κ·(#intervals − 1) + Σ residuals` over all `2^{n−1}`
/// partitions, returned with the minimizing interval list.
pub fn exhaustive_potts(channels: &[Vec<f64>], w: Option<&[f64]>, kappa: f64) -> (f64, Vec<(usize, usize)>) {
    let n = channels[0].len();
    let mut best = (f64::INFINITY, Vec::new());
    for cuts in 0u64..(1 << (n - 1)) {
        let mut intervals = Vec::new();
        let mut start = 1;
        for p in 1..n {
            if cuts >> (p - 1) & 1 == 1 {
                intervals.push((start, p));
                start = p + 1;
            }
        }
        intervals.push((start, n));
        let mut e = kappa * (intervals.len() - 1) as f64;
        for &(l, r) in &intervals {
            for g in channels {
                e += normal_equations_fit(g, w, l, r).2;
            }
        }
        if e < best.0 {
            best = (e, intervals);
        }
    }
    best
}

/// `λ·Σ|x_{p+1} − x_p| + ½‖x − g‖²`.
pub fn tv_objective(x: &[f64], g: &[f64], lambda: f64) -> f64 {
    let tv: f64 = x.windows(2).map(|d| (d[1] - d[0]).abs()).sum();
    lambda * tv + 0.5 * x.iter().zip(g).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
}

/// TV denoising by projected gradient on the dual
/// `min_{|q_i| ≤ λ} ½‖g − Dᵀq‖²`, with primal `x = g − Dᵀq`.
pub fn tv_projected_gradient(g: &[f64], lambda: f64, tol: f64) -> Vec<f64> {
    let n = g.len();
    if n < 2 {
        return g.to_vec();
    }
    let primal = |q: &[f64]| {
        let mut x = g.to_vec();
        for (i, &qi) in q.iter().enumerate() {
            // (Dx)_i = x_{i+1} − x_i, so Dᵀq adds q_i at i+1 and subtracts at i.
            x[i] += qi;
            x[i + 1] -= qi;
        }
        x
    };
    let mut q = vec![0.0; n - 1];
    let step = 0.25;
    for _ in 0..2_000_000 {
        let x = primal(&q);
        let mut change = 0.0f64;
        for i in 0..n - 1 {
            // Gradient of ½‖g − Dᵀq‖² in q_i is −(x_{i+1} − x_i).
            let next = (q[i] + step * (x[i + 1] - x[i])).clamp(-lambda, lambda);
            change = change.max((next - q[i]).abs());
            q[i] = next;
        }
        if change < tol {
            break;
        }
    }
    primal(&q)
}

/// `|∇I·w + I_t| + (weight/2)·‖w − r‖²`.
pub fn prox_objective(grad: [f64; 2], it: f64, r: [f64; 2], weight: f64, w: [f64; 2]) -> f64 {
    (grad[0] * w[0] + grad[1] * w[1] + it).abs() + 0.5 * weight * ((w[0] - r[0]).powi(2) + (w[1] - r[1]).powi(2))
}

/// Grid minimum of a 2D function: a coarse pass over `centre ± radius`
/// followed by a `step`-spaced pass around the coarse winner.
pub fn grid_min(f: impl Fn([f64; 2]) -> f64, centre: [f64; 2], radius: f64, step: f64) -> f64 {
    let scan = |c: [f64; 2], rad: f64, h: f64| {
        let m = (rad / h).ceil() as i64;
        let mut best = (f64::INFINITY, c);
        for i in -m..=m {
            for j in -m..=m {
                let p = [c[0] + i as f64 * h, c[1] + j as f64 * h];
                let v = f(p);
                if v < best.0 {
                    best = (v, p);
                }
            }
        }
        best
    };
    let coarse_h = 50.0 * step;
    let (_, c) = scan(centre, radius, coarse_h);
    scan(c, 2.0 * coarse_h, step).0
}

/// Plain sort-based median: lower middle element.
pub fn sorted_median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v[(v.len() - 1) / 2]
}
