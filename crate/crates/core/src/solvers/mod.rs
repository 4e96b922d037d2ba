//! Sum-rate maximization for MiLAC-aided and digital MU-MISO beamforming.
//!
//! All solvers work on the normalized problem: noise `σ² = 4σ_n²`, the factor
//! two of the MiLAC response absorbed into `F`. Rates are in bits.
//!
//! The MiLAC solver runs block coordinate descent on the weighted-MSE form of
//! the split problem `max R(Y, p)  s.t. ‖Y‖₂ ≤ 1, Σp ≤ P_T`, where the
//! effective channel is either the `K×K` reduced channel `Ĥ = (HHᴴ)^{1/2}`
//! ([`wmmse_lc`]) or `H` itself ([`wmmse_lc_fulldim`]).

mod blocks;
mod digital;
mod oracle;
mod rate;
mod reduce;
mod stationarity;
mod wmmse;

pub use blocks::{
    compute_alpha_beta, pgd_objective, pgd_wirtinger_gradient, spectral_ball_projection,
    update_omega, update_p, update_u, weighted_mse, y_subproblem_pgd, PgdOutcome, PowerUpdate,
    WmmseState, YSubproblem,
};
pub use digital::{digital_wmmse, digital_wmmse_warm};
pub use oracle::{brute_force_oracle, OracleResult};
pub use rate::{split_rate, sum_rate, sum_rate_nats};
pub use reduce::{lift_solution, project_onto_channel_range, reduce_dimension, ReducedChannel};
pub use stationarity::{
    fulldim_stationarity_residual, split_rate_gradient, split_stationarity_residual,
    stationarity_residual, StationarityReport,
};
pub use wmmse::{wmmse_lc, wmmse_lc_fulldim, wmmse_lc_fulldim_warm, wmmse_lc_warm};

use crate::linalg::CMat;

/// Tolerances, caps and problem constants shared by all solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Relative change of `Σ log ω` that ends the outer loop.
    pub eps_out: f64,
    /// Relative change of `Y` that ends the inner PGD loop.
    pub eps_in: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Normalized noise power `σ² = 4σ_n²`.
    pub noise: f64,
    /// Transmit power budget `P_T`.
    pub budget: f64,
    /// `λ_min(HHᴴ)/λ_max(HHᴴ)` below this is treated as rank deficient.
    pub rank_tol: f64,
    /// Record the weighted-MSE objective after every block update.
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps_out: 1e-6,
            eps_in: 1e-6,
            max_outer: 500,
            max_inner: 2000,
            noise: 1.0,
            budget: 1.0,
            rank_tol: 1e-10,
            record_trace: false,
        }
    }
}

impl SolverConfig {
    /// Noise for `SNR = P_T/σ_n²` (dB), normalized as `σ² = 4σ_n²`.
    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        let sigma_n2 = self.budget / 10f64.powf(snr_db / 10.0);
        self.noise = 4.0 * sigma_n2;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.eps_out > 0.0
            && self.eps_in > 0.0
            && self.noise > 0.0
            && self.budget > 0.0
            && self.max_outer > 0
            && self.max_inner > 0;
        if ok {
            Ok(())
        } else {
            Err(crate::MilacError::InvalidArgument(
                "solver tolerances, caps, noise and budget must be positive".into(),
            ))
        }
    }
}

/// Outcome of a sum-rate solver.
#[derive(Debug, Clone)]
pub struct SumRateResult {
    /// Sum rate of `w` on the original channel, bits per channel use.
    pub rate: f64,
    /// Realized `N×K` beamformer.
    pub w: CMat,
    /// Per-user powers (`‖w_k‖²` for the digital solver).
    pub p: Vec<f64>,
    /// Spectral-ball variable at exit (`K×K` reduced, `N×K` full-dim).
    /// For the digital solver this is the reduced precoder `V`.
    pub y: CMat,
    pub iterations: usize,
    pub inner_iterations: usize,
    pub converged: bool,
    /// `Σ log₂ ω_k` after each ω update.
    pub surrogate_history: Vec<f64>,
    /// Weighted-MSE objective after each block update (when recorded).
    pub objective_trace: Vec<f64>,
    /// Largest `|R(Π W) − R(W)|` seen over full-dim iterates (when recorded).
    pub projection_gap: Option<f64>,
}
