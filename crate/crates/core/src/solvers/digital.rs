use super::blocks::{update_omega, update_u, weighted_mse, WmmseState, YSubproblem};
use super::rate::sum_rate;
use super::reduce::{reduce_dimension, ReducedChannel};
use super::{SolverConfig, SumRateResult};
use crate::error::{MilacError, Result};
use crate::linalg::{self, c, CMat, HermitianEigen};

/// Eigenvalues below this fraction of the largest are treated as zero.
const NULL_EIG_REL: f64 = 1e-14;

/// Minimizer of `tr(VᴴQV) − 2 Re tr(LV)` over `‖V‖²_F ≤ P_T`:
/// `V = (Q + μI)⁻¹Lᴴ` with `μ ≥ 0` from bisection on the power constraint.
fn regularized_precoder(sub: &YSubproblem, budget: f64) -> CMat {
    let eig = HermitianEigen::new(&sub.q);
    let rhs = eig.vectors.adjoint() * sub.l.adjoint();
    let lam_max = eig.max().max(0.0);
    let weights: Vec<f64> = (0..rhs.nrows())
        .map(|i| rhs.row(i).iter().map(|z| z.norm_sqr()).sum())
        .collect();
    let power = |mu: f64| -> f64 {
        eig.values
            .iter()
            .zip(&weights)
            .map(|(&l, &w)| {
                let d = l.max(0.0) + mu;
                if w == 0.0 {
                    0.0
                } else if d <= NULL_EIG_REL * lam_max || d == 0.0 {
                    f64::INFINITY
                } else {
                    w / (d * d)
                }
            })
            .sum()
    };
    let mu = if power(0.0) <= budget {
        0.0
    } else {
        let total: f64 = weights.iter().sum();
        let mut lo = 0.0;
        let mut hi = (total / budget).sqrt();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if power(mid) > budget {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        hi
    };
    let scale: Vec<f64> = eig
        .values
        .iter()
        .zip(&weights)
        .map(|(&l, &w)| {
            let d = l.max(0.0) + mu;
            if w == 0.0 || d == 0.0 {
                0.0
            } else {
                1.0 / d
            }
        })
        .collect();
    &eig.vectors * linalg::real_diag(&scale) * rhs
}

/// Classical WMMSE for digital beamforming under `‖W‖²_F ≤ P_T`, run in the
/// reduced space `W = Hᴴ H̄^{-1/2} V` from `V = Ĥ·√P_T/‖Ĥ‖_F`.
pub fn digital_wmmse(h: &CMat, cfg: &SolverConfig) -> Result<SumRateResult> {
    cfg.validate()?;
    let reduced = reduce_dimension(h, cfg.rank_tol)?;
    let v0 = &reduced.hhat * c(cfg.budget.sqrt() / linalg::frobenius(&reduced.hhat), 0.0);
    run_digital(h, &reduced, v0, cfg)
}

/// Digital WMMSE started from a given feasible beamformer `w0` (`N×K`).
///
/// The sum rate never decreases along the iterations, so the result is at
/// least as good as `w0` itself.
pub fn digital_wmmse_warm(h: &CMat, w0: &CMat, cfg: &SolverConfig) -> Result<SumRateResult> {
    cfg.validate()?;
    if w0.nrows() != h.ncols() || w0.ncols() != h.nrows() {
        return Err(MilacError::Dimension(format!(
            "warm start is {}x{}, channel needs {}x{}",
            w0.nrows(),
            w0.ncols(),
            h.ncols(),
            h.nrows()
        )));
    }
    let power = linalg::frobenius_sq(w0);
    if power > cfg.budget * (1.0 + 1e-9) {
        return Err(MilacError::InvalidArgument(format!(
            "warm start uses power {power} above the budget {}",
            cfg.budget
        )));
    }
    let reduced = reduce_dimension(h, cfg.rank_tol)?;
    // the component outside Ran(Hᴴ) carries no signal; dropping it keeps the rate
    let v0 = reduced.range_basis().adjoint() * w0;
    run_digital(h, &reduced, v0, cfg)
}

fn run_digital(
    h: &CMat,
    reduced: &ReducedChannel,
    v0: CMat,
    cfg: &SolverConfig,
) -> Result<SumRateResult> {
    let g = &reduced.hhat;
    let k = g.nrows();
    let mut state = WmmseState::new(v0, vec![1.0; k]);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut prev: Option<f64> = None;

    while iterations < cfg.max_outer {
        iterations += 1;
        state.u = update_u(&state, g, cfg.noise);
        if cfg.record_trace {
            trace.push(weighted_mse(&state, g, cfg.noise));
        }
        state.omega = update_omega(&state, g, cfg.noise)?;
        if cfg.record_trace {
            trace.push(weighted_mse(&state, g, cfg.noise));
        }
        let surrogate: f64 = state.omega.iter().map(|w| w.log2()).sum();
        state.history.push(surrogate);

        let sub = YSubproblem::new(g, &state.u, &state.omega);
        state.y = regularized_precoder(&sub, cfg.budget);
        if cfg.record_trace {
            trace.push(weighted_mse(&state, g, cfg.noise));
        }

        if let Some(prev) = prev {
            let scale = if prev > 0.0 { prev } else { 1.0 };
            if (surrogate - prev).abs() <= cfg.eps_out * scale {
                converged = true;
                break;
            }
        }
        prev = Some(surrogate);
    }

    let w = reduced.range_basis() * &state.y;
    let p = (0..k).map(|j| w.column(j).norm_squared()).collect();
    let rate = sum_rate(h, &w, cfg.noise)?;
    Ok(SumRateResult {
        rate,
        w,
        p,
        y: state.y,
        iterations,
        inner_iterations: 0,
        converged,
        surrogate_history: state.history,
        objective_trace: trace,
        projection_gap: None,
    })
}
