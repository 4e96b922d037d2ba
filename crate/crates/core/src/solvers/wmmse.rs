use super::blocks::{
    compute_alpha_beta, update_omega, update_p, update_u, weighted_mse, y_subproblem_pgd,
    WmmseState, YSubproblem,
};
use super::rate::sum_rate;
use super::reduce::{project_onto_channel_range, reduce_dimension};
use super::{SolverConfig, SumRateResult};
use crate::error::{MilacError, Result};
use crate::linalg::{self, c, CMat};

/// Everything the outer loop produces before lifting back to `W`.
struct SplitRun {
    state: WmmseState,
    iterations: usize,
    inner_iterations: usize,
    converged: bool,
    trace: Vec<f64>,
    projection_gap: Option<f64>,
}

/// Outer BCD over `(u, ω, p, Y)` on the effective channel `g`.
///
/// `range_check`, when given, is the original channel; every outer iterate
/// `Y diag(p)^{1/2}` is then projected onto `Ran(Hᴴ)` and the rate change is
/// tracked.
fn run_split_bcd(
    g: &CMat,
    y0: CMat,
    p0: Vec<f64>,
    cfg: &SolverConfig,
    range_check: Option<&CMat>,
) -> Result<SplitRun> {
    let mut state = WmmseState::new(y0, p0);
    let mut trace = Vec::new();
    let mut inner_iterations = 0;
    let mut converged = false;
    let mut iterations = 0;
    let mut projection_gap: Option<f64> = None;
    let mut prev_surrogate: Option<f64> = None;

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

        let (alpha, beta) = compute_alpha_beta(&state, g);
        state.p = update_p(&alpha, &beta, cfg.budget).p;
        if cfg.record_trace {
            trace.push(weighted_mse(&state, g, cfg.noise));
        }

        let sub = YSubproblem::new(g, &state.u, &state.omega);
        let pgd = y_subproblem_pgd(&sub, &state.y, &state.p, cfg.eps_in, cfg.max_inner);
        inner_iterations += pgd.iterations;
        state.y = pgd.y;
        if cfg.record_trace {
            trace.push(weighted_mse(&state, g, cfg.noise));
            if let Some(h) = range_check {
                let sq: Vec<f64> = state.p.iter().map(|x| x.sqrt()).collect();
                let w = &state.y * linalg::real_diag(&sq);
                let pw = project_onto_channel_range(h, &w)?;
                let gap = (sum_rate(h, &pw, cfg.noise)? - sum_rate(h, &w, cfg.noise)?).abs();
                projection_gap = Some(projection_gap.map_or(gap, |g: f64| g.max(gap)));
            }
        }

        if let Some(prev) = prev_surrogate {
            let change = (surrogate - prev).abs();
            let scale = if prev > 0.0 { prev } else { 1.0 };
            if change <= cfg.eps_out * scale {
                converged = true;
                break;
            }
        }
        prev_surrogate = Some(surrogate);
    }
    Ok(SplitRun {
        state,
        iterations,
        inner_iterations,
        converged,
        trace,
        projection_gap,
    })
}

fn finish(run: SplitRun, w: CMat, h: &CMat, noise: f64) -> Result<SumRateResult> {
    let rate = sum_rate(h, &w, noise)?;
    Ok(SumRateResult {
        rate,
        w,
        p: run.state.p,
        y: run.state.y,
        iterations: run.iterations,
        inner_iterations: run.inner_iterations,
        converged: run.converged,
        surrogate_history: run.state.history,
        objective_trace: run.trace,
        projection_gap: run.projection_gap,
    })
}

/// Low-complexity WMMSE on the reduced `K×K` problem.
///
/// Initializes `p = (P_T/K)·1`, `Y = Ĥ/‖Ĥ‖₂`, and returns the lifted
/// `W = Hᴴ H̄^{-1/2} Y diag(p)^{1/2}`.
pub fn wmmse_lc(h: &CMat, cfg: &SolverConfig) -> Result<SumRateResult> {
    cfg.validate()?;
    let reduced = reduce_dimension(h, cfg.rank_tol)?;
    let y0 = &reduced.hhat * c(1.0 / linalg::spectral_norm(&reduced.hhat), 0.0);
    let run = run_split_bcd(&reduced.hhat, y0, equal_split(h.nrows(), cfg), cfg, None)?;
    let w = reduced.lift_split(&run.state.y, &run.state.p);
    finish(run, w, h, cfg.noise)
}

fn equal_split(k: usize, cfg: &SolverConfig) -> Vec<f64> {
    vec![cfg.budget / k as f64; k]
}

fn check_start(y0: &CMat, p0: &[f64], shape: (usize, usize), cfg: &SolverConfig) -> Result<()> {
    if y0.shape() != shape || p0.len() != shape.1 {
        return Err(MilacError::Dimension(format!(
            "warm start Y is {:?} with {} powers, expected {shape:?}",
            y0.shape(),
            p0.len()
        )));
    }
    let total: f64 = p0.iter().sum();
    if linalg::spectral_norm(y0) > 1.0 + 1e-9
        || p0.iter().any(|&x| x < 0.0)
        || total > cfg.budget * (1.0 + 1e-9)
    {
        return Err(MilacError::InvalidArgument(
            "warm start is infeasible".into(),
        ));
    }
    Ok(())
}

/// [`wmmse_lc`] started from a feasible reduced point `(Y₀, p₀)` instead of
/// the default initialization.
pub fn wmmse_lc_warm(h: &CMat, y0: &CMat, p0: &[f64], cfg: &SolverConfig) -> Result<SumRateResult> {
    cfg.validate()?;
    let k = h.nrows();
    check_start(y0, p0, (k, k), cfg)?;
    let reduced = reduce_dimension(h, cfg.rank_tol)?;
    let run = run_split_bcd(&reduced.hhat, y0.clone(), p0.to_vec(), cfg, None)?;
    let w = reduced.lift_split(&run.state.y, &run.state.p);
    finish(run, w, h, cfg.noise)
}

/// The same block scheme on the full `N×K` variable `F` against `H`
/// directly, `W = F diag(p)^{1/2}`, initialized at `F = Hᴴ/‖H‖₂`.
pub fn wmmse_lc_fulldim(h: &CMat, cfg: &SolverConfig) -> Result<SumRateResult> {
    cfg.validate()?;
    let norm = linalg::spectral_norm(h);
    if !(norm > 0.0) {
        return Err(crate::MilacError::InvalidArgument("channel is zero".into()));
    }
    let y0 = h.adjoint() * c(1.0 / norm, 0.0);
    let run = run_split_bcd(h, y0, equal_split(h.nrows(), cfg), cfg, Some(h))?;
    fulldim_finish(run, h, cfg)
}

fn fulldim_finish(run: SplitRun, h: &CMat, cfg: &SolverConfig) -> Result<SumRateResult> {
    let sq: Vec<f64> = run.state.p.iter().map(|x| x.sqrt()).collect();
    let w = &run.state.y * linalg::real_diag(&sq);
    finish(run, w, h, cfg.noise)
}

/// [`wmmse_lc_fulldim`] started from a feasible `(F₀, p₀)`, `F₀` being `N×K`.
pub fn wmmse_lc_fulldim_warm(
    h: &CMat,
    f0: &CMat,
    p0: &[f64],
    cfg: &SolverConfig,
) -> Result<SumRateResult> {
    cfg.validate()?;
    check_start(f0, p0, (h.ncols(), h.nrows()), cfg)?;
    let run = run_split_bcd(h, f0.clone(), p0.to_vec(), cfg, Some(h))?;
    fulldim_finish(run, h, cfg)
}
