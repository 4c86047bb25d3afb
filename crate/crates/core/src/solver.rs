//! ADMM iterations for the split problem
//! `min_w ρ_d(w) [+ γ φ(u, m)] + λ Σ_k α_k ‖∇_{d_k} P_k‖₀`
//! with the couplings `w = z_k` (and `u = w` when matches are supplied).

use log::{debug, trace};

use crate::dataterm::{prox_u, prox_w, prox_w_extended, LinearizedData, SparseMatches};
use crate::error::{invalid_param, Error, Result};
use crate::grid::{DirectionSet, FlowField};
use crate::regularizer::{DirectionalRegularizer, RegularizerMode};
use crate::scalar::Scalar;

/// Parameters of one ADMM run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    /// Weight `λ` of the jump count, in squared 0–255 intensity units.
    pub lambda: T,
    /// Weight `γ` of the sparse-match term.
    pub gamma: T,
    /// Initial penalty `η⁽⁰⁾`.
    pub eta0: T,
    /// Geometric growth `η⁽ⁱ⁺¹⁾ = τ η⁽ⁱ⁾`.
    pub tau: T,
    /// `η₂ = eta2_ratio · η₁` for the match coupling.
    pub eta2_ratio: T,
    pub max_iters: usize,
    /// Stop once `max_k ‖w − z_k‖_∞` drops below this (pixels).
    pub tolerance: T,
    pub mode: RegularizerMode,
    pub directions: DirectionSet<T>,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            lambda: T::of(30.0),
            gamma: T::of(5.0),
            eta0: T::of(0.01),
            tau: T::of(1.1),
            eta2_ratio: T::one(),
            max_iters: 200,
            tolerance: T::of(0.01),
            mode: RegularizerMode::AffineL0,
            directions: DirectionSet::four(),
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |x: T| x.is_finite() && x >= T::zero();
        if !finite_nonneg(self.lambda) {
            return Err(invalid_param("lambda", "must be finite and >= 0"));
        }
        if !finite_nonneg(self.gamma) {
            return Err(invalid_param("gamma", "must be finite and >= 0"));
        }
        if !(self.eta0.is_finite() && self.eta0 > T::zero()) {
            return Err(invalid_param("eta0", "must be > 0"));
        }
        if !(self.tau.is_finite() && self.tau > T::one()) {
            return Err(invalid_param("tau", "must be > 1"));
        }
        if !(self.eta2_ratio.is_finite() && self.eta2_ratio > T::zero()) {
            return Err(invalid_param("eta2_ratio", "must be > 0"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > T::zero()) {
            return Err(invalid_param("tolerance", "must be > 0"));
        }
        if self.max_iters == 0 {
            return Err(invalid_param("max_iters", "must be >= 1"));
        }
        Ok(())
    }

    /// Penalty at iteration `i`.
    pub fn eta(&self, iteration: usize) -> T {
        eta_schedule(self.eta0, self.tau, iteration)
    }
}

/// `η⁽ⁱ⁾ = η⁽⁰⁾ τⁱ`.
pub fn eta_schedule<T: Scalar>(eta0: T, tau: T, iteration: usize) -> T {
    eta0 * tau.powi(iteration as i32)
}

/// Splitting variables and multipliers.
#[derive(Debug, Clone)]
pub struct DualState<T> {
    pub z: Vec<FlowField<T>>,
    pub mu: Vec<FlowField<T>>,
    pub u: FlowField<T>,
    pub xi: FlowField<T>,
    pub eta: T,
}

impl<T: Scalar> DualState<T> {
    /// `z_k = u = init`, zero multipliers.
    pub fn new(init: &FlowField<T>, k: usize, eta: T) -> Self {
        let (w, h) = init.shape();
        let zero = FlowField::zeros(w, h).expect("non-empty grid");
        Self {
            z: vec![init.clone(); k],
            mu: vec![zero.clone(); k],
            u: init.clone(),
            xi: zero,
            eta,
        }
    }
}

/// Result of [`admm_solve`].
#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub flow: FlowField<T>,
    pub iterations: usize,
    /// `max_k ‖w − z_k‖_∞` after the last iteration.
    pub coupling_residual: T,
    pub converged: bool,
    pub state: DualState<T>,
}

/// `r = (1/K) Σ_k (z_k − μ_k/η)`.
pub fn compute_r<T: Scalar>(z: &[FlowField<T>], mu: &[FlowField<T>], eta: T) -> Result<FlowField<T>> {
    if z.is_empty() || z.len() != mu.len() {
        return Err(invalid_param("z", "need K >= 1 splitting fields with multipliers"));
    }
    let scale = T::of_usize(z.len()).recip();
    let mut r = FlowField::zeros(z[0].width(), z[0].height())?;
    for (zk, mk) in z.iter().zip(mu) {
        for i in 0..r.len() {
            let (a, b, c) = (r.at(i), zk.at(i), mk.at(i));
            r.set_at(i, [a[0] + b[0] - c[0] / eta, a[1] + b[1] - c[1] / eta]);
        }
    }
    Ok(r.map(|[a, b]| [a * scale, b * scale]))
}

/// `t = (η₁K r + η₂ (u + ξ/η₂)) / (η₁K + η₂)`.
pub fn compute_t<T: Scalar>(
    r: &FlowField<T>,
    u: &FlowField<T>,
    xi: &FlowField<T>,
    eta1: T,
    eta2: T,
    k: usize,
) -> Result<FlowField<T>> {
    let a = eta1 * T::of_usize(k);
    let total = a + eta2;
    if !(total > T::zero()) {
        return Err(invalid_param("eta", "eta1*K + eta2 must be positive"));
    }
    let mut t = r.clone();
    for i in 0..t.len() {
        let (ri, ui, xii) = (r.at(i), u.at(i), xi.at(i));
        let mut out = [T::zero(); 2];
        for c in 0..2 {
            // η₂(u + ξ/η₂) written as η₂u + ξ so that η₂ = 0 is allowed
            let pull = if eta2 > T::zero() {
                eta2 * ui[c] + xii[c]
            } else {
                T::zero()
            };
            out[c] = (a * ri[c] + pull) / total;
        }
        t.set_at(i, out);
    }
    Ok(t)
}

fn ensure_finite<T: Scalar>(field: &FlowField<T>, name: &str, iteration: usize) -> Result<()> {
    if field.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite {
            iteration,
            field: name.to_owned(),
        })
    }
}

/// Runs the ADMM cycle from `init` until the coupling residual falls below
/// the tolerance or the iteration budget is spent.
///
/// Without matches this is the base model; with matches the additional
/// variable `u` and multiplier `ξ` are carried along.
pub fn admm_solve<T: Scalar>(
    data: &LinearizedData<T>,
    matches: Option<&SparseMatches<T>>,
    init: &FlowField<T>,
    config: &SolverConfig<T>,
) -> Result<Solution<T>> {
    config.validate()?;
    if data.shape() != init.shape() {
        return Err(Error::ShapeMismatch {
            expected: data.shape(),
            found: init.shape(),
        });
    }
    if let Some(m) = matches {
        if m.shape() != init.shape() {
            return Err(Error::ShapeMismatch {
                expected: init.shape(),
                found: m.shape(),
            });
        }
    }
    ensure_finite(init, "init", 0)?;
    let (width, height) = init.shape();
    let regularizer = DirectionalRegularizer::new(width, height, &config.directions)?;
    let k = config.directions.len();
    let mut state = DualState::new(init, k, config.eta0);
    let mut w = init.clone();
    let mut residual = T::infinity();
    let mut iterations = 0;
    let mut converged = false;

    for n in 0..config.max_iters {
        let eta = config.eta(n);
        state.eta = eta;
        let r = compute_r(&state.z, &state.mu, eta)?;
        let eta2 = config.eta2_ratio * eta;
        w = match matches {
            Some(_) => {
                let t = compute_t(&r, &state.u, &state.xi, eta, eta2, k)?;
                prox_w_extended(data, &t, eta * T::of_usize(k), eta2)?
            }
            None => prox_w(data, &r, eta * T::of_usize(k))?,
        };
        ensure_finite(&w, "w", n)?;

        for (j, (_, alpha)) in config.directions.iter().enumerate() {
            let v = w.zip_map(&state.mu[j], |a, m| [a[0] + m[0] / eta, a[1] + m[1] / eta]);
            let kappa = T::of(2.0) * alpha * config.lambda / eta;
            state.z[j] = regularizer.update(j, &v, kappa, config.mode)?;
            ensure_finite(&state.z[j], &format!("z{}", j + 1), n)?;
        }

        if let Some(m) = matches {
            let v = w.zip_map(&state.xi, |a, x| [a[0] - x[0] / eta2, a[1] - x[1] / eta2]);
            state.u = prox_u(m, &v, config.gamma, eta2)?;
            ensure_finite(&state.u, "u", n)?;
        }

        residual = T::zero();
        for (zk, mk) in state.z.iter().zip(state.mu.iter_mut()) {
            *mk = mk.zip_map(&w.zip_map(zk, |a, b| [a[0] - b[0], a[1] - b[1]]), |m, d| {
                [m[0] + eta * d[0], m[1] + eta * d[1]]
            });
            residual = residual.max(w.max_abs_diff(zk));
        }
        if matches.is_some() {
            state.xi = state
                .xi
                .zip_map(&state.u.zip_map(&w, |a, b| [a[0] - b[0], a[1] - b[1]]), |x, d| {
                    [x[0] + eta2 * d[0], x[1] + eta2 * d[1]]
                });
        }
        iterations = n + 1;
        trace!("admm iteration {n}: eta={eta} coupling={residual}");
        if residual < config.tolerance {
            converged = true;
            break;
        }
    }
    debug!("admm finished after {iterations} iterations, coupling residual {residual}, converged={converged}");

    Ok(Solution {
        flow: w,
        iterations,
        coupling_residual: residual,
        converged,
        state,
    })
}
