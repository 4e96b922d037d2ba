//! Block updates of the split weighted-MSE problem
//!
//! ```text
//! min Σ_k ω_k E_k(u_k, p, Y) − ln ω_k   s.t. ‖Y‖₂ ≤ 1, Σp ≤ P_T
//! E_k = |1 − √p_k u_k* g_kᴴy_k|² + |u_k|² (Σ_{j≠k} p_j |g_kᴴy_j|² + σ²)
//! ```
//!
//! for an effective channel `G` (`K×M`, rows `g_kᴴ`) and `Y` (`M×K`).

use crate::error::{MilacError, Result};
use crate::linalg::{self, c, CMat, Svd};
use num_complex::Complex64;

/// Denominators of the ω update closer to zero than this switch to `1 + SINR`.
const OMEGA_DENOM_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct WmmseState {
    pub u: Vec<Complex64>,
    pub omega: Vec<f64>,
    pub y: CMat,
    pub p: Vec<f64>,
    /// `Σ log₂ ω_k` after each ω update.
    pub history: Vec<f64>,
}

impl WmmseState {
    pub fn new(y: CMat, p: Vec<f64>) -> Self {
        let k = p.len();
        WmmseState {
            u: vec![Complex64::new(0.0, 0.0); k],
            omega: vec![1.0; k],
            y,
            p,
            history: Vec::new(),
        }
    }

    pub fn users(&self) -> usize {
        self.p.len()
    }
}

/// Effective gains `A = G Y`, `A[k][j] = g_kᴴ y_j`.
fn gains(g: &CMat, y: &CMat) -> CMat {
    g * y
}

/// `u_k = √p_k g_kᴴy_k / (Σ_j p_j |g_kᴴy_j|² + σ²)`.
pub fn update_u(state: &WmmseState, g: &CMat, noise: f64) -> Vec<Complex64> {
    let a = gains(g, &state.y);
    (0..state.users())
        .map(|k| {
            let total: f64 = (0..state.users())
                .map(|j| state.p[j] * a[(k, j)].norm_sqr())
                .sum::<f64>()
                + noise;
            a[(k, k)] * state.p[k].max(0.0).sqrt() / total
        })
        .collect()
}

/// `ω_k = (1 − u_k* √p_k g_kᴴy_k)⁻¹`, which equals `1 + SINR_k` for a freshly
/// updated `u`.
pub fn update_omega(state: &WmmseState, g: &CMat, noise: f64) -> Result<Vec<f64>> {
    let a = gains(g, &state.y);
    let k = state.users();
    let mut omega = Vec::with_capacity(k);
    for i in 0..k {
        let signal = a[(i, i)] * state.p[i].max(0.0).sqrt();
        let denom = 1.0 - (state.u[i].conj() * signal).re;
        if denom < -OMEGA_DENOM_FLOOR {
            return Err(MilacError::InvalidArgument(format!(
                "omega denominator {denom:.3e} <= 0 for user {i}: u is stale"
            )));
        }
        if denom <= OMEGA_DENOM_FLOOR {
            let interf: f64 = (0..k)
                .filter(|&j| j != i)
                .map(|j| state.p[j] * a[(i, j)].norm_sqr())
                .sum::<f64>()
                + noise;
            omega.push(1.0 + signal.norm_sqr() / interf);
        } else {
            omega.push(1.0 / denom);
        }
    }
    Ok(omega)
}

/// `Σ_k ω_k E_k − ln ω_k`.
pub fn weighted_mse(state: &WmmseState, g: &CMat, noise: f64) -> f64 {
    let a = gains(g, &state.y);
    let k = state.users();
    let mut total = 0.0;
    for i in 0..k {
        let u = state.u[i];
        let own = (c(1.0, 0.0) - u.conj() * a[(i, i)] * state.p[i].max(0.0).sqrt()).norm_sqr();
        let interf: f64 = (0..k)
            .filter(|&j| j != i)
            .map(|j| state.p[j] * a[(i, j)].norm_sqr())
            .sum::<f64>()
            + noise;
        let e = own + u.norm_sqr() * interf;
        total += state.omega[i] * e - state.omega[i].ln();
    }
    total
}

/// `α_k = ω_k Re(u_k* g_kᴴy_k)` and `β_k = Σ_j ω_j |u_j|² |g_jᴴy_k|²`.
pub fn compute_alpha_beta(state: &WmmseState, g: &CMat) -> (Vec<f64>, Vec<f64>) {
    let a = gains(g, &state.y);
    let k = state.users();
    let alpha = (0..k)
        .map(|i| state.omega[i] * (state.u[i].conj() * a[(i, i)]).re)
        .collect();
    let beta = (0..k)
        .map(|col| {
            (0..k)
                .map(|j| state.omega[j] * state.u[j].norm_sqr() * a[(j, col)].norm_sqr())
                .sum()
        })
        .collect();
    (alpha, beta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerUpdate {
    pub p: Vec<f64>,
    pub lambda: f64,
}

fn allocation(alpha: &[f64], beta: &[f64], lambda: f64) -> Vec<f64> {
    alpha
        .iter()
        .zip(beta)
        .map(|(&a, &b)| {
            if a <= 0.0 {
                0.0
            } else {
                let d = b + lambda;
                if d > 0.0 {
                    (a / d).powi(2)
                } else {
                    f64::INFINITY
                }
            }
        })
        .collect()
}

/// Maximizes `Σ_k 2α_k√p_k − β_k p_k` over `Σp ≤ P_T, p ≥ 0`:
/// `p_k = α_k²/(β_k + λ)²` with `λ = 0` when that fits the budget, otherwise
/// the root of `Σ_k α_k²/(β_k + λ)² = P_T` found by bisection.
/// Users with `α_k ≤ 0` get zero power.
pub fn update_p(alpha: &[f64], beta: &[f64], budget: f64) -> PowerUpdate {
    let free = allocation(alpha, beta, 0.0);
    let free_total: f64 = free.iter().sum();
    if free_total <= budget {
        return PowerUpdate {
            p: free,
            lambda: 0.0,
        };
    }
    let sum_a2: f64 = alpha
        .iter()
        .map(|&a| if a > 0.0 { a * a } else { 0.0 })
        .sum();
    let mut lo = 0.0;
    // Σ α²/(β+λ)² ≤ Σ α²/λ² = P_T at this λ since β ≥ 0
    let mut hi = (sum_a2 / budget).sqrt();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let total: f64 = allocation(alpha, beta, mid).iter().sum();
        if total > budget {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    PowerUpdate {
        p: allocation(alpha, beta, hi),
        lambda: hi,
    }
}

/// Nearest point (Frobenius) of the spectral-norm unit ball: clips singular
/// values at one.
pub fn spectral_ball_projection(m: &CMat) -> CMat {
    let svd = Svd::new(m);
    if svd.s.first().is_none_or(|&s| s <= 1.0) {
        return m.clone();
    }
    svd.recompose_with(|s| s.min(1.0))
}

/// Data of the `Y` subproblem
/// `min tr(diag(p) YᴴQY) − 2 Re tr(diag(p)^{1/2} L Y)` over `‖Y‖₂ ≤ 1`,
/// with `Q = Gᴴ diag(ω|u|²) G` and `L = diag(ω u*) G`.
#[derive(Debug, Clone)]
pub struct YSubproblem {
    pub q: CMat,
    pub l: CMat,
}

impl YSubproblem {
    pub fn new(g: &CMat, u: &[Complex64], omega: &[f64]) -> Self {
        let weights: Vec<f64> = u.iter().zip(omega).map(|(u, w)| w * u.norm_sqr()).collect();
        let q = g.adjoint() * linalg::real_diag(&weights) * g;
        let mut l = g.clone();
        for (k, (u, w)) in u.iter().zip(omega).enumerate() {
            let s = u.conj() * *w;
            for x in l.row_mut(k).iter_mut() {
                *x *= s;
            }
        }
        // Q is Hermitian in exact arithmetic; remove roundoff asymmetry.
        let q = (&q + q.adjoint()) * c(0.5, 0.0);
        YSubproblem { q, l }
    }
}

pub fn pgd_objective(sub: &YSubproblem, y: &CMat, p: &[f64]) -> f64 {
    let dp = linalg::real_diag(p);
    let sq: Vec<f64> = p.iter().map(|x| x.max(0.0).sqrt()).collect();
    let quad = (dp * y.adjoint() * &sub.q * y).trace().re;
    let lin = (linalg::real_diag(&sq) * &sub.l * y).trace().re;
    quad - 2.0 * lin
}

/// `∂f/∂Y* = Q Y diag(p) − Lᴴ diag(p)^{1/2}`; the real gradient of `f`
/// with respect to the Frobenius inner product `Re tr(AᴴB)` is twice this.
pub fn pgd_wirtinger_gradient(sub: &YSubproblem, y: &CMat, p: &[f64]) -> CMat {
    let sq: Vec<f64> = p.iter().map(|x| x.max(0.0).sqrt()).collect();
    &sub.q * y * linalg::real_diag(p) - sub.l.adjoint() * linalg::real_diag(&sq)
}

#[derive(Debug, Clone)]
pub struct PgdOutcome {
    pub y: CMat,
    pub iterations: usize,
    pub converged: bool,
    /// Largest single-step increase of the subproblem objective (≤ 0 when
    /// every step descends).
    pub max_increase: f64,
}

/// Projected gradient descent with step `η = (‖Q‖₂ max_k p_k)⁻¹`.
///
/// Stops when `‖Y − Y′‖_F/‖Y′‖_F ≤ eps_in` or after `max_inner` steps.
pub fn y_subproblem_pgd(
    sub: &YSubproblem,
    y0: &CMat,
    p: &[f64],
    eps_in: f64,
    max_inner: usize,
) -> PgdOutcome {
    let pmax = p.iter().cloned().fold(0.0, f64::max);
    if pmax <= 0.0 {
        return PgdOutcome {
            y: y0.clone(),
            iterations: 0,
            converged: true,
            max_increase: 0.0,
        };
    }
    let qnorm = linalg::spectral_norm(&sub.q);
    if qnorm <= 0.0 {
        // Objective is linear in Y; maximize Re tr(diag(p)^{1/2} L Y) on the ball.
        let sq: Vec<f64> = p.iter().map(|x| x.max(0.0).sqrt()).collect();
        let b = linalg::real_diag(&sq) * &sub.l;
        if linalg::frobenius(&b) == 0.0 {
            return PgdOutcome {
                y: y0.clone(),
                iterations: 0,
                converged: true,
                max_increase: 0.0,
            };
        }
        let svd = Svd::new(&b);
        let y = &svd.v * svd.u.adjoint();
        let inc = pgd_objective(sub, &y, p) - pgd_objective(sub, y0, p);
        return PgdOutcome {
            y,
            iterations: 1,
            converged: true,
            max_increase: inc,
        };
    }
    let eta = 1.0 / (qnorm * pmax);
    let mut y = y0.clone();
    let mut f_prev = pgd_objective(sub, &y, p);
    let mut max_increase = f64::NEG_INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_inner {
        let grad = pgd_wirtinger_gradient(sub, &y, p);
        let next = spectral_ball_projection(&(&y - grad * c(eta, 0.0)));
        iterations += 1;
        let f_next = pgd_objective(sub, &next, p);
        max_increase = max_increase.max(f_next - f_prev);
        f_prev = f_next;
        let ref_norm = linalg::frobenius(&y);
        let change = linalg::frobenius(&(&next - &y));
        y = next;
        if change <= eps_in * ref_norm || change == 0.0 {
            converged = true;
            break;
        }
    }
    PgdOutcome {
        y,
        iterations,
        converged,
        max_increase: if iterations == 0 { 0.0 } else { max_increase },
    }
}
