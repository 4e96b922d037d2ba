//! Beamforming-matrix sets: MiLAC-achievable, digital, phase-shifter analog
//! and hybrid digital–MiLAC.
//!
//! A matrix `W` is MiLAC-achievable at budget `P_T` iff `W = F diag(p)^{1/2}`
//! with `‖F‖₂ ≤ 1` and `Σp ≤ P_T`, equivalently iff some `p` with
//! `Σp ≤ P_T` satisfies `WᴴW ⪯ diag(p)`.

use crate::error::{MilacError, Result};
use crate::linalg::{self, c, CMat, HermitianEigen, Svd};
use crate::lp;
use crate::rng;
use rand::Rng;

/// Relative slack of the PSD membership test, scaled by `‖W‖₂²`.
pub const MEMBERSHIP_REL_TOL: f64 = 1e-9;
pub const MAX_CUTS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct MilacBeamformer {
    pub f: CMat,
    pub p: Vec<f64>,
    pub budget: f64,
}

impl MilacBeamformer {
    pub fn new(f: CMat, p: Vec<f64>, budget: f64, tol: f64) -> Result<Self> {
        if f.ncols() != p.len() {
            return Err(MilacError::Dimension(format!(
                "F has {} columns but p has {} entries",
                f.ncols(),
                p.len()
            )));
        }
        if p.iter().any(|&x| x < 0.0) || p.iter().sum::<f64>() > budget + tol {
            return Err(MilacError::InvalidArgument(
                "powers must be nonnegative and within budget".into(),
            ));
        }
        let norm = linalg::spectral_norm(&f);
        if norm > 1.0 + tol {
            return Err(MilacError::InfeasibleResponse { norm, tol });
        }
        Ok(MilacBeamformer { f, p, budget })
    }

    /// `W = F diag(p)^{1/2}`.
    pub fn beamformer(&self) -> CMat {
        let sq: Vec<f64> = self.p.iter().map(|x| x.sqrt()).collect();
        &self.f * linalg::real_diag(&sq)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DigitalBeamformer {
    pub w: CMat,
    pub budget: f64,
}

impl DigitalBeamformer {
    pub fn new(w: CMat, budget: f64, tol: f64) -> Result<Self> {
        let power = linalg::frobenius_sq(&w);
        if power > budget + tol {
            return Err(MilacError::InvalidArgument(format!(
                "digital beamformer power {power} exceeds budget {budget}"
            )));
        }
        Ok(DigitalBeamformer { w, budget })
    }
}

/// Constant-modulus analog beamformer `[W_A]_{ij} = e^{jφ_ij}/√(NK)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShifterMatrix {
    pub phases: nalgebra::DMatrix<f64>,
    pub w: CMat,
}

/// `λ_min(diag(p) − WᴴW)`.
pub fn membership_margin(w: &CMat, p: &[f64]) -> f64 {
    let gram = w.adjoint() * w;
    let m = linalg::real_diag(p) - gram;
    HermitianEigen::new(&m).min()
}

/// Lemma-1 test at fixed powers: `diag(p) − WᴴW ⪰ −tol·‖W‖₂² I`.
pub fn milac_membership_with_power(w: &CMat, p: &[f64], rel_tol: f64) -> bool {
    if w.ncols() != p.len() || p.iter().any(|&x| x < 0.0) {
        return false;
    }
    let scale = linalg::spectral_norm(w).powi(2);
    membership_margin(w, p) >= -rel_tol * scale
}

/// Output of [`min_power_envelope`].
#[derive(Debug, Clone)]
pub struct PowerEnvelope {
    /// Feasible powers: `diag(p) ⪰ WᴴW` holds exactly (up to eigen-solver roundoff).
    pub p: Vec<f64>,
    /// `Σp`, an upper bound on the minimal budget.
    pub total: f64,
    /// Optimal value of the last cutting-plane LP, a lower bound.
    pub lower_bound: f64,
    pub cuts: usize,
}

impl PowerEnvelope {
    pub fn is_member(&self, budget: f64, tol: f64) -> bool {
        self.total <= budget + tol
    }
}

/// Smallest-total-power diagonal majorant of `WᴴW`, by cutting planes.
///
/// Each round solves `min Σp` over the accumulated cuts
/// `Σ_i p_i |v_i|² ≥ vᴴWᴴWv`, then separates with the minimum eigenvector
/// of `diag(p) − WᴴW`. Stops once `λ_min ≥ −tol·‖W‖₂²`; the returned powers
/// are shifted by the remaining deficit so they are feasible.
pub fn min_power_envelope(w: &CMat, rel_tol: f64) -> Result<PowerEnvelope> {
    let k = w.ncols();
    if k > 64 {
        return Err(MilacError::InvalidArgument(format!(
            "min_power_envelope supports K <= 64, got {k}"
        )));
    }
    let gram = w.adjoint() * w;
    let scale = linalg::spectral_norm(w).powi(2);
    if scale == 0.0 {
        return Ok(PowerEnvelope {
            p: vec![0.0; k],
            total: 0.0,
            lower_bound: 0.0,
            cuts: 0,
        });
    }
    let tol = rel_tol * scale;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for i in 0..k {
        let mut r = vec![0.0; k];
        r[i] = 1.0;
        rows.push(r);
        rhs.push(gram[(i, i)].re);
    }
    for _ in 0..MAX_CUTS {
        let sol = lp::solve_covering(&rows, &rhs, k)?;
        let eig = HermitianEigen::new(&(linalg::real_diag(&sol.p) - &gram));
        let lam = eig.min();
        if lam >= -tol {
            let shift = (-lam).max(0.0);
            let p: Vec<f64> = sol.p.iter().map(|x| x + shift).collect();
            return Ok(PowerEnvelope {
                total: p.iter().sum(),
                p,
                lower_bound: sol.objective,
                cuts: rows.len(),
            });
        }
        let v = eig.vectors.column(0);
        let coeffs: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
        let bound = (v.adjoint() * &gram * v)[(0, 0)].re;
        rows.push(coeffs);
        rhs.push(bound.max(0.0));
    }
    Err(MilacError::NoConvergence {
        iterations: MAX_CUTS,
        what: "power envelope cutting planes".into(),
    })
}

/// Factor a member `W` as `F diag(p)^{1/2}` with `F = W diag(p†)^{1/2}`.
///
/// The returned budget is `Σp`.
pub fn decompose_milac(w: &CMat, p: &[f64]) -> Result<MilacBeamformer> {
    if !milac_membership_with_power(w, p, MEMBERSHIP_REL_TOL) {
        return Err(MilacError::NotMember {
            min_eig: if w.ncols() == p.len() {
                membership_margin(w, p)
            } else {
                f64::NAN
            },
        });
    }
    let inv_sqrt: Vec<f64> = p
        .iter()
        .map(|&x| if x > 0.0 { 1.0 / x.sqrt() } else { 0.0 })
        .collect();
    let f = w * linalg::real_diag(&inv_sqrt);
    Ok(MilacBeamformer {
        f,
        p: p.to_vec(),
        budget: p.iter().sum(),
    })
}

pub fn phase_shifter_matrix(phases: &nalgebra::DMatrix<f64>) -> PhaseShifterMatrix {
    let (n, k) = phases.shape();
    let amp = 1.0 / ((n * k) as f64).sqrt();
    let w = CMat::from_fn(n, k, |i, j| {
        let (s, co) = phases[(i, j)].sin_cos();
        c(amp * co, amp * s)
    });
    PhaseShifterMatrix {
        phases: phases.clone(),
        w,
    }
}

/// Hybrid digital–MiLAC factorization `W = F P` with semi-unitary `F`
/// (`N×K`) and `P = D Vᴴ` (`K×K`), `‖P‖_F = ‖W‖_F`.
pub fn hybrid_digital_milac_decompose(w: &DigitalBeamformer) -> Result<(CMat, CMat)> {
    let (n, k) = w.w.shape();
    if n < k {
        return Err(MilacError::Dimension(format!(
            "hybrid decomposition needs N >= K, got N={n}, K={k}"
        )));
    }
    if linalg::frobenius(&w.w) == 0.0 {
        return Ok((CMat::identity(n, k), CMat::zeros(k, k)));
    }
    let svd = Svd::new(&w.w);
    let f = svd.u.clone();
    let p = linalg::real_diag(&svd.s) * svd.v.adjoint();
    Ok((f, p))
}

/// Random full-power boundary point: semi-unitary `F` and `Σp = P_T`.
pub fn sample_milac_boundary(
    n: usize,
    k: usize,
    budget: f64,
    rng: &mut impl Rng,
) -> Result<MilacBeamformer> {
    if n < k || k == 0 {
        return Err(MilacError::Dimension(format!(
            "boundary sampling needs N >= K >= 1, got N={n}, K={k}"
        )));
    }
    let g = rng::complex_normal_matrix(n, k, rng);
    let f = Svd::new(&g).recompose_with(|_| 1.0);
    let e: Vec<f64> = (0..k)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let s: f64 = e.iter().sum();
    let p: Vec<f64> = e.iter().map(|x| budget * x / s).collect();
    Ok(MilacBeamformer { f, p, budget })
}
